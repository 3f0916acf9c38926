#pragma once

// Hierarchical state-machine executive with simulated-time concurrency.
//
// A MachineSpec is either Sequential (one child at a time, routed by
// transitions) or Concurrent (every child starts at the same simulated
// instant; the container finishes at the latest child and maps the joint
// child outcomes through an ordered policy). Concurrent children run one
// after another on the host thread, each on a private copy of the userdata
// and a private clock, so replays are deterministic.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace fetchsim::hsm {

using Outcome = std::string;
using Json = nlohmann::json;

inline constexpr std::size_t kDefaultStepBudget = 10'000;

class SimClock {
 public:
  explicit SimClock(double start = 0.0, double limit = 1e12);

  double now() const noexcept { return now_; }
  double limit() const noexcept { return limit_; }
  /// Throws ClockOverflow if the result would pass `limit` or is not finite.
  void advance(double seconds);

 private:
  double now_;
  double limit_;
};

/// Shared blackboard. Values are JSON so final states compare and serialize
/// exactly.
class Userdata {
 public:
  Userdata() = default;
  explicit Userdata(Json object);

  bool contains(const std::string& key) const { return data_.contains(key); }
  const Json& at(const std::string& key) const;
  void set(const std::string& key, Json value) { data_[key] = std::move(value); }
  std::vector<std::string> keys() const;
  const Json& json() const noexcept { return data_; }

  friend bool operator==(const Userdata&, const Userdata&) = default;

 private:
  Json data_ = Json::object();
};

/// What a running state may touch: only its declared keys and the clock.
class StateContext {
 public:
  StateContext(std::string path, const std::set<std::string>& inputs,
               const std::set<std::string>& outputs, Userdata& userdata, SimClock& clock)
      : path_(std::move(path)), inputs_(inputs), outputs_(outputs), userdata_(userdata), clock_(clock) {}

  const Json& get(const std::string& key) const;
  bool has(const std::string& key) const;
  void set(const std::string& key, Json value);

  void charge(double seconds) { clock_.advance(seconds); }
  double now() const noexcept { return clock_.now(); }
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
  const std::set<std::string>& inputs_;
  const std::set<std::string>& outputs_;
  Userdata& userdata_;
  SimClock& clock_;
};

using Body = std::function<Outcome(StateContext&)>;

struct StateSpec {
  std::string name;
  std::vector<Outcome> outcomes;
  std::set<std::string> input_keys;
  std::set<std::string> output_keys;
  Body body;
  /// Charged after the body returns, on top of anything the body charges.
  std::optional<double> declared_duration;
};

enum class ContainerKind { Sequential, Concurrent };

/// Concurrent outcome rule: fires when every listed child ended with the
/// listed outcome. Rules are tried in order.
struct PolicyRule {
  std::map<std::string, Outcome> when;
  Outcome outcome;
};

struct MachineSpec;
using MachinePtr = std::shared_ptr<const MachineSpec>;

struct Child {
  std::variant<StateSpec, MachinePtr> node;

  const std::string& name() const;
  const std::vector<Outcome>& outcomes() const;
  bool is_machine() const { return std::holds_alternative<MachinePtr>(node); }
};

struct MachineSpec {
  std::string name;
  ContainerKind kind = ContainerKind::Sequential;
  std::vector<Outcome> outcomes;
  /// Keys the caller supplies in the initial userdata.
  std::set<std::string> input_keys;
  std::vector<Child> children;
  /// Sequential only: (child, outcome) -> child name or container outcome.
  std::map<std::pair<std::string, Outcome>, std::string> transitions;
  /// Concurrent only.
  std::vector<PolicyRule> policy;
  std::optional<Outcome> default_outcome;
  /// Sequential start child; empty means the first declared child.
  std::string initial;

  /// Union of output keys over all descendant states.
  std::set<std::string> written_keys() const;
  const Child* find_child(const std::string& child) const;
};

class MachineBuilder {
 public:
  MachineBuilder(std::string name, ContainerKind kind, std::vector<Outcome> outcomes);

  MachineBuilder& inputs(std::set<std::string> keys);
  MachineBuilder& add(StateSpec state, std::map<Outcome, std::string> transitions = {});
  MachineBuilder& add(MachinePtr machine, std::map<Outcome, std::string> transitions = {});
  MachineBuilder& initial(std::string child);
  MachineBuilder& when(std::map<std::string, Outcome> outcomes, Outcome result);
  MachineBuilder& otherwise(Outcome result);

  MachinePtr build() const { return std::make_shared<const MachineSpec>(spec_); }
  const MachineSpec& spec() const { return spec_; }

 private:
  void add_transitions(const std::string& child, const std::map<Outcome, std::string>& transitions);

  MachineSpec spec_;
};

struct Finding {
  std::string path;
  std::string kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;
  bool ok() const { return findings.empty(); }
  bool has(const std::string& kind) const;
};

ValidationReport validate(const MachineSpec& spec);

struct TraceRecord {
  double sim_time = 0.0;
  std::string path;
  Outcome outcome;
  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

using Trace = std::vector<TraceRecord>;

struct ExecuteOptions {
  std::size_t step_budget = kDefaultStepBudget;
};

struct Execution {
  Outcome outcome;
  Userdata userdata;
  Trace trace;
};

/// Runs `spec` to a container outcome. Throws UndeclaredKeyAccess,
/// UnmappedOutcome, ClockOverflow or StepBudgetExceeded.
Execution execute(const MachineSpec& spec, Userdata initial, SimClock& clock, const ExecuteOptions& options = {});

/// One line per record: `<sim_time> <path> -> <outcome>`. Times use the
/// shortest representation that parses back to the same double.
std::string trace_to_text(const Trace& trace);
Trace parse_trace(const std::string& text);

using BehaviourRegistry = std::map<std::string, Body>;

/// Builds a machine from a JSON document. States name a registered
/// `behaviour` or return a fixed outcome (`returns`, default the first
/// declared outcome); `duration` sets declared_duration.
MachinePtr machine_from_json(const Json& doc, const BehaviourRegistry& behaviours = {});

}  // namespace fetchsim::hsm
