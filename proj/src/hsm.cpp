#include "fetchsim/hsm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

#include "fetchsim/errors.hpp"

namespace fetchsim::hsm {

SimClock::SimClock(double start, double limit) : now_(start), limit_(limit) {
  if (!std::isfinite(start) || !(limit >= start)) throw std::invalid_argument("SimClock: bad start/limit");
}

void SimClock::advance(double seconds) {
  if (std::isnan(seconds) || seconds < 0.0) throw std::invalid_argument("SimClock: negative or NaN advance");
  const double next = now_ + seconds;
  if (!std::isfinite(next) || next > limit_)
    throw ClockOverflow("simulated clock would pass its limit of " + std::to_string(limit_) + " s");
  now_ = next;
}

Userdata::Userdata(Json object) : data_(std::move(object)) {
  if (!data_.is_object()) throw std::invalid_argument("Userdata must be a JSON object");
}

const Json& Userdata::at(const std::string& key) const {
  auto it = data_.find(key);
  if (it == data_.end()) throw MissingKey("userdata has no key '" + key + "'");
  return *it;
}

std::vector<std::string> Userdata::keys() const {
  std::vector<std::string> out;
  for (auto it = data_.begin(); it != data_.end(); ++it) out.push_back(it.key());
  return out;
}

const Json& StateContext::get(const std::string& key) const {
  if (!inputs_.contains(key)) throw UndeclaredKeyAccess(path_ + " read undeclared key '" + key + "'");
  return userdata_.at(key);
}

bool StateContext::has(const std::string& key) const {
  if (!inputs_.contains(key)) throw UndeclaredKeyAccess(path_ + " probed undeclared key '" + key + "'");
  return userdata_.contains(key);
}

void StateContext::set(const std::string& key, Json value) {
  if (!outputs_.contains(key)) throw UndeclaredKeyAccess(path_ + " wrote undeclared key '" + key + "'");
  userdata_.set(key, std::move(value));
}

const std::string& Child::name() const {
  if (const auto* s = std::get_if<StateSpec>(&node)) return s->name;
  return std::get<MachinePtr>(node)->name;
}

const std::vector<Outcome>& Child::outcomes() const {
  if (const auto* s = std::get_if<StateSpec>(&node)) return s->outcomes;
  return std::get<MachinePtr>(node)->outcomes;
}

namespace {

std::set<std::string> child_written_keys(const Child& c) {
  if (const auto* s = std::get_if<StateSpec>(&c.node)) return s->output_keys;
  return std::get<MachinePtr>(c.node)->written_keys();
}

bool contains(const std::vector<Outcome>& v, const std::string& x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

std::set<std::string> MachineSpec::written_keys() const {
  std::set<std::string> out;
  for (const auto& c : children) out.merge(child_written_keys(c));
  return out;
}

const Child* MachineSpec::find_child(const std::string& child) const {
  for (const auto& c : children)
    if (c.name() == child) return &c;
  return nullptr;
}

MachineBuilder::MachineBuilder(std::string name, ContainerKind kind, std::vector<Outcome> outcomes) {
  spec_.name = std::move(name);
  spec_.kind = kind;
  spec_.outcomes = std::move(outcomes);
}

MachineBuilder& MachineBuilder::inputs(std::set<std::string> keys) {
  spec_.input_keys = std::move(keys);
  return *this;
}

void MachineBuilder::add_transitions(const std::string& child, const std::map<Outcome, std::string>& transitions) {
  for (const auto& [outcome, target] : transitions) spec_.transitions[{child, outcome}] = target;
}

MachineBuilder& MachineBuilder::add(StateSpec state, std::map<Outcome, std::string> transitions) {
  add_transitions(state.name, transitions);
  spec_.children.push_back(Child{std::move(state)});
  return *this;
}

MachineBuilder& MachineBuilder::add(MachinePtr machine, std::map<Outcome, std::string> transitions) {
  add_transitions(machine->name, transitions);
  spec_.children.push_back(Child{std::move(machine)});
  return *this;
}

MachineBuilder& MachineBuilder::initial(std::string child) {
  spec_.initial = std::move(child);
  return *this;
}

MachineBuilder& MachineBuilder::when(std::map<std::string, Outcome> outcomes, Outcome result) {
  spec_.policy.push_back({std::move(outcomes), std::move(result)});
  return *this;
}

MachineBuilder& MachineBuilder::otherwise(Outcome result) {
  spec_.default_outcome = std::move(result);
  return *this;
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::has(const std::string& kind) const {
  return std::any_of(findings.begin(), findings.end(), [&](const Finding& f) { return f.kind == kind; });
}

namespace {

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == ':';
  });
}

class Validator {
 public:
  ValidationReport report;

  void add(const std::string& path, const std::string& kind, const std::string& message) {
    report.findings.push_back({path, kind, message});
  }

  void check_outcome_set(const std::string& path, const std::vector<Outcome>& outcomes) {
    if (outcomes.empty()) add(path, "no_outcomes", "declares no outcomes");
    std::set<std::string> seen;
    for (const auto& o : outcomes) {
      if (!valid_name(o)) add(path, "invalid_name", "outcome '" + o + "' is not a valid identifier");
      if (!seen.insert(o).second) add(path, "duplicate_outcome", "outcome '" + o + "' declared twice");
    }
  }

  void check_state(const StateSpec& s, const std::string& path) {
    check_outcome_set(path, s.outcomes);
    if (!s.body && !s.declared_duration) add(path, "missing_body", "state has neither a body nor a duration");
    if (s.declared_duration && !(*s.declared_duration >= 0.0 && std::isfinite(*s.declared_duration)))
      add(path, "negative_duration", "declared duration must be finite and non-negative");
    for (const auto& k : s.input_keys) reads.emplace_back(path, k);
    for (const auto& k : s.output_keys) produced.insert(k);
  }

  void check_machine(const MachineSpec& m, const std::string& path) {
    if (!valid_name(m.name)) add(path, "invalid_name", "container name '" + m.name + "' is not a valid identifier");
    check_outcome_set(path, m.outcomes);
    for (const auto& k : m.input_keys) produced.insert(k);
    if (m.children.empty()) {
      add(path, "no_children", "container has no children");
      return;
    }

    std::set<std::string> names;
    for (const auto& c : m.children) {
      const std::string cpath = path + "/" + c.name();
      if (!valid_name(c.name())) add(cpath, "invalid_name", "child name '" + c.name() + "' is not a valid identifier");
      if (!names.insert(c.name()).second) add(cpath, "duplicate_child", "child name used twice");
      if (contains(m.outcomes, c.name()))
        add(cpath, "ambiguous_target", "child name equals a container outcome");
      if (const auto* s = std::get_if<StateSpec>(&c.node)) {
        check_state(*s, cpath);
      } else {
        const auto& sub = std::get<MachinePtr>(c.node);
        if (!sub) {
          add(cpath, "missing_body", "null nested machine");
          continue;
        }
        check_machine(*sub, cpath);
      }
    }

    if (m.kind == ContainerKind::Sequential)
      check_sequential(m, path);
    else
      check_concurrent(m, path);
  }

  void check_sequential(const MachineSpec& m, const std::string& path) {
    if (!m.policy.empty() || m.default_outcome)
      add(path, "bad_policy", "outcome policy is only meaningful for concurrent containers");
    if (!m.initial.empty() && !m.find_child(m.initial))
      add(path, "initial_unknown", "initial child '" + m.initial + "' does not exist");

    for (const auto& [key, target] : m.transitions) {
      const auto& [child, outcome] = key;
      const Child* c = m.find_child(child);
      if (!c) {
        add(path, "unknown_transition_source", "transition from unknown child '" + child + "'");
        continue;
      }
      if (!contains(c->outcomes(), outcome))
        add(path + "/" + child, "undeclared_outcome_transition", "transition on undeclared outcome '" + outcome + "'");
      if (!m.find_child(target) && !contains(m.outcomes, target))
        add(path + "/" + child, "unknown_target",
            "outcome '" + outcome + "' targets '" + target + "', which is neither a child nor a container outcome");
    }
    for (const auto& c : m.children)
      for (const auto& o : c.outcomes())
        if (!m.transitions.contains({c.name(), o}))
          add(path + "/" + c.name(), "unmapped_outcome", "outcome '" + o + "' has no transition");

    // Reachability from the initial child.
    const std::string start = m.initial.empty() ? m.children.front().name() : m.initial;
    std::set<std::string> seen{start};
    std::deque<std::string> frontier{start};
    while (!frontier.empty()) {
      const std::string cur = frontier.front();
      frontier.pop_front();
      const Child* c = m.find_child(cur);
      if (!c) continue;
      for (const auto& o : c->outcomes()) {
        auto it = m.transitions.find({cur, o});
        if (it == m.transitions.end() || !m.find_child(it->second)) continue;
        if (seen.insert(it->second).second) frontier.push_back(it->second);
      }
    }
    for (const auto& c : m.children)
      if (!seen.contains(c.name()))
        add(path + "/" + c.name(), "unreachable_child", "child is not reachable from '" + start + "'");
  }

  void check_concurrent(const MachineSpec& m, const std::string& path) {
    if (!m.transitions.empty()) add(path, "bad_policy", "concurrent containers route by policy, not transitions");
    if (!m.initial.empty()) add(path, "bad_policy", "concurrent containers have no initial child");
    for (std::size_t i = 0; i < m.policy.size(); ++i) {
      const auto& rule = m.policy[i];
      const std::string rpath = path + "#policy[" + std::to_string(i) + "]";
      if (rule.when.empty()) add(rpath, "bad_policy", "rule has no conditions");
      if (!contains(m.outcomes, rule.outcome))
        add(rpath, "bad_policy", "rule yields undeclared container outcome '" + rule.outcome + "'");
      for (const auto& [child, outcome] : rule.when) {
        const Child* c = m.find_child(child);
        if (!c)
          add(rpath, "bad_policy", "rule references unknown child '" + child + "'");
        else if (!contains(c->outcomes(), outcome))
          add(rpath, "bad_policy", "rule references undeclared outcome '" + outcome + "' of '" + child + "'");
      }
    }
    if (!m.default_outcome)
      add(path, "missing_default", "concurrent container needs a default outcome");
    else if (!contains(m.outcomes, *m.default_outcome))
      add(path, "bad_policy", "default outcome '" + *m.default_outcome + "' is not a container outcome");

    for (std::size_t i = 0; i < m.children.size(); ++i) {
      const auto a = child_written_keys(m.children[i]);
      for (std::size_t j = i + 1; j < m.children.size(); ++j) {
        for (const auto& k : child_written_keys(m.children[j]))
          if (a.contains(k))
            add(path, "write_conflict",
                "children '" + m.children[i].name() + "' and '" + m.children[j].name() + "' both write '" + k + "'");
      }
    }
  }

  void check_keys() {
    for (const auto& [path, key] : reads)
      if (!produced.contains(key))
        add(path, "undeclared_key", "reads '" + key + "', which no input declaration or state output provides");
  }

 private:
  std::vector<std::pair<std::string, std::string>> reads;
  std::set<std::string> produced;
};

}  // namespace

ValidationReport validate(const MachineSpec& spec) {
  Validator v;
  v.check_machine(spec, spec.name);
  v.check_keys();
  return std::move(v.report);
}

// ---------------------------------------------------------------------------
// Execution

namespace {

class Runner {
 public:
  explicit Runner(const ExecuteOptions& options) : options_(options) {}

  Outcome run_machine(const MachineSpec& m, const std::string& path, Userdata& ud, SimClock& clock, Trace& trace) {
    return m.kind == ContainerKind::Sequential ? run_sequential(m, path, ud, clock, trace)
                                               : run_concurrent(m, path, ud, clock, trace);
  }

 private:
  void count_step(const std::string& path) {
    if (++steps_ > options_.step_budget)
      throw StepBudgetExceeded("step budget of " + std::to_string(options_.step_budget) + " transitions exceeded at " +
                               path);
  }

  Outcome run_child(const Child& c, const std::string& path, Userdata& ud, SimClock& clock, Trace& trace) {
    if (const auto* s = std::get_if<StateSpec>(&c.node)) {
      StateContext ctx(path, s->input_keys, s->output_keys, ud, clock);
      Outcome out = s->body ? s->body(ctx) : s->outcomes.front();
      if (s->declared_duration) clock.advance(*s->declared_duration);
      if (!contains(s->outcomes, out)) throw UnmappedOutcome(path + " returned undeclared outcome '" + out + "'");
      return out;
    }
    return run_machine(*std::get<MachinePtr>(c.node), path, ud, clock, trace);
  }

  Outcome run_sequential(const MachineSpec& m, const std::string& path, Userdata& ud, SimClock& clock,
                         Trace& trace) {
    const Child* current = m.initial.empty() ? &m.children.front() : m.find_child(m.initial);
    if (!current) throw InvalidMachine(path + ": initial child '" + m.initial + "' does not exist");
    for (;;) {
      const std::string cpath = path + "/" + current->name();
      Outcome out = run_child(*current, cpath, ud, clock, trace);
      trace.push_back({clock.now(), cpath, out});
      count_step(cpath);
      auto it = m.transitions.find({current->name(), out});
      if (it == m.transitions.end()) throw UnmappedOutcome(cpath + " outcome '" + out + "' has no transition");
      if (const Child* next = m.find_child(it->second)) {
        current = next;
      } else if (contains(m.outcomes, it->second)) {
        return it->second;
      } else {
        throw UnmappedOutcome(cpath + " targets unknown '" + it->second + "'");
      }
    }
  }

  Outcome run_concurrent(const MachineSpec& m, const std::string& path, Userdata& ud, SimClock& clock,
                         Trace& trace) {
    const double start = clock.now();
    double longest = 0.0;
    std::map<std::string, Outcome> results;
    Trace joint;
    std::vector<std::pair<std::set<std::string>, Userdata>> writes;
    for (const auto& c : m.children) {
      const std::string cpath = path + "/" + c.name();
      Userdata local = ud;
      SimClock local_clock(start, clock.limit());
      Outcome out = run_child(c, cpath, local, local_clock, joint);
      joint.push_back({local_clock.now(), cpath, out});
      count_step(cpath);
      longest = std::max(longest, local_clock.now() - start);
      results[c.name()] = out;
      writes.emplace_back(child_written_keys(c), std::move(local));
    }
    for (auto& [keys, local] : writes)
      for (const auto& k : keys)
        if (local.contains(k)) ud.set(k, local.at(k));
    std::stable_sort(joint.begin(), joint.end(),
                     [](const TraceRecord& a, const TraceRecord& b) { return a.sim_time < b.sim_time; });
    trace.insert(trace.end(), joint.begin(), joint.end());
    clock.advance(longest);

    for (const auto& rule : m.policy) {
      const bool match = std::all_of(rule.when.begin(), rule.when.end(), [&](const auto& kv) {
        auto it = results.find(kv.first);
        return it != results.end() && it->second == kv.second;
      });
      if (match) return rule.outcome;
    }
    if (!m.default_outcome) throw UnmappedOutcome(path + ": no policy rule matched and no default outcome");
    return *m.default_outcome;
  }

  const ExecuteOptions& options_;
  std::size_t steps_ = 0;
};

}  // namespace

Execution execute(const MachineSpec& spec, Userdata initial, SimClock& clock, const ExecuteOptions& options) {
  Execution result{{}, std::move(initial), {}};
  Runner runner(options);
  result.outcome = runner.run_machine(spec, spec.name, result.userdata, clock, result.trace);
  result.trace.push_back({clock.now(), spec.name, result.outcome});
  return result;
}

// ---------------------------------------------------------------------------
// Trace text

std::string trace_to_text(const Trace& trace) {
  std::string out;
  char buf[64];
  for (const auto& r : trace) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, r.sim_time);
    out.append(buf, end);
    out += ' ';
    out += r.path;
    out += " -> ";
    out += r.outcome;
    out += '\n';
  }
  return out;
}

Trace parse_trace(const std::string& text) {
  Trace trace;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string time, path, arrow, outcome;
    if (!(fields >> time >> path >> arrow >> outcome) || arrow != "->")
      throw SchemaError("trace line " + std::to_string(lineno), "expected '<sim_time> <path> -> <outcome>'");
    TraceRecord r;
    auto [ptr, ec] = std::from_chars(time.data(), time.data() + time.size(), r.sim_time);
    if (ec != std::errc() || ptr != time.data() + time.size())
      throw SchemaError("trace line " + std::to_string(lineno), "bad sim_time '" + time + "'");
    r.path = std::move(path);
    r.outcome = std::move(outcome);
    trace.push_back(std::move(r));
  }
  return trace;
}

// ---------------------------------------------------------------------------
// JSON construction

namespace {

template <typename T>
T field(const Json& doc, const std::string& key, const std::string& path) {
  if (!doc.contains(key)) throw SchemaError(path + "." + key, "missing field");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + "." + key, e.what());
  }
}

template <typename T>
T optional_field(const Json& doc, const std::string& key, const std::string& path, T fallback) {
  return doc.contains(key) ? field<T>(doc, key, path) : fallback;
}

MachinePtr machine_from_json_at(const Json& doc, const BehaviourRegistry& behaviours, const std::string& path);

StateSpec state_from_json(const Json& doc, const BehaviourRegistry& behaviours, const std::string& path) {
  StateSpec s;
  s.name = field<std::string>(doc, "name", path);
  s.outcomes = field<std::vector<std::string>>(doc, "outcomes", path);
  s.input_keys = optional_field<std::set<std::string>>(doc, "input_keys", path, {});
  s.output_keys = optional_field<std::set<std::string>>(doc, "output_keys", path, {});
  if (doc.contains("duration")) s.declared_duration = field<double>(doc, "duration", path);
  if (doc.contains("behaviour")) {
    const auto name = field<std::string>(doc, "behaviour", path);
    auto it = behaviours.find(name);
    if (it == behaviours.end()) throw SchemaError(path + ".behaviour", "unknown behaviour '" + name + "'");
    s.body = it->second;
  } else {
    if (s.outcomes.empty()) throw SchemaError(path + ".outcomes", "must not be empty");
    Outcome fixed = optional_field<std::string>(doc, "returns", path, s.outcomes.front());
    s.body = [fixed](StateContext&) { return fixed; };
  }
  return s;
}

MachinePtr machine_from_json_at(const Json& doc, const BehaviourRegistry& behaviours, const std::string& path) {
  if (!doc.is_object()) throw SchemaError(path, "expected an object");
  MachineSpec m;
  m.name = field<std::string>(doc, "name", path);
  const auto kind = field<std::string>(doc, "kind", path);
  if (kind == "sequential")
    m.kind = ContainerKind::Sequential;
  else if (kind == "concurrent")
    m.kind = ContainerKind::Concurrent;
  else
    throw SchemaError(path + ".kind", "expected 'sequential' or 'concurrent'");
  m.outcomes = field<std::vector<std::string>>(doc, "outcomes", path);
  m.input_keys = optional_field<std::set<std::string>>(doc, "input_keys", path, {});
  m.initial = optional_field<std::string>(doc, "initial", path, "");

  const auto& children = doc.contains("children") ? doc.at("children") : Json::array();
  if (!children.is_array()) throw SchemaError(path + ".children", "expected an array");
  for (std::size_t i = 0; i < children.size(); ++i) {
    const std::string cpath = path + ".children[" + std::to_string(i) + "]";
    const auto& c = children[i];
    if (!c.is_object()) throw SchemaError(cpath, "expected an object");
    if (c.contains("kind"))
      m.children.push_back(Child{machine_from_json_at(c, behaviours, cpath)});
    else
      m.children.push_back(Child{state_from_json(c, behaviours, cpath)});
  }

  if (doc.contains("transitions")) {
    const auto& t = doc.at("transitions");
    if (!t.is_object()) throw SchemaError(path + ".transitions", "expected an object");
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (!it->is_object()) throw SchemaError(path + ".transitions." + it.key(), "expected an object");
      for (auto jt = it->begin(); jt != it->end(); ++jt) {
        if (!jt->is_string())
          throw SchemaError(path + ".transitions." + it.key() + "." + jt.key(), "expected a string");
        m.transitions[{it.key(), jt.key()}] = jt->get<std::string>();
      }
    }
  }
  if (doc.contains("policy")) {
    const auto& p = doc.at("policy");
    if (!p.is_array()) throw SchemaError(path + ".policy", "expected an array");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const std::string rpath = path + ".policy[" + std::to_string(i) + "]";
      m.policy.push_back({field<std::map<std::string, std::string>>(p[i], "when", rpath),
                          field<std::string>(p[i], "outcome", rpath)});
    }
  }
  if (doc.contains("default")) m.default_outcome = field<std::string>(doc, "default", path);
  return std::make_shared<const MachineSpec>(std::move(m));
}

}  // namespace

MachinePtr machine_from_json(const Json& doc, const BehaviourRegistry& behaviours) {
  return machine_from_json_at(doc, behaviours, "$");
}

}  // namespace fetchsim::hsm
