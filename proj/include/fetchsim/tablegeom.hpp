#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fetchsim/percept.hpp"
#include "fetchsim/world.hpp"

namespace fetchsim {

struct HeuristicParams {
  double band_min = 0.4;  // m, horizontal surfaces below are floor-like
  double band_max = 1.2;  // m, above are wall cupboards or ceiling
  double cluster_tolerance = 0.25;
  int min_cluster_points = 30;
  double security_distance = 0.4;  // clearance from the table edge

  void validate() const;
};

struct PrincipalAxes {
  Vec2 first;   // larger variance
  Vec2 second;  // first rotated +90 degrees
  double first_variance = 0.0;
  double second_variance = 0.0;
};

/// Eigen-decomposition of the 2D covariance of `points` about `centroid`.
/// When the eigenvalues are within 1% of each other the second axis is the
/// eigenvector closest to world +y.
PrincipalAxes principal_axes(std::span<const Vec2> points, Vec2 centroid);

struct TableCluster {
  std::vector<LabeledPoint> points;
  std::vector<Vec2> footprint;
  Vec2 centroid;
  Vec2 first_axis;
  Vec2 second_axis;
  double first_extent = 0.0;   // max |projection| on first_axis
  double second_extent = 0.0;  // max |projection| on second_axis
};

/// Fits centroid, axes and extents. nullopt when an extent is zero.
std::optional<TableCluster> fit_table_cluster(std::vector<LabeledPoint> points);

/// Table-labelled points inside the height band, merged across clouds
/// (exact duplicates dropped), grouped by single linkage on the ground plane.
std::vector<TableCluster> extract_table_clusters(std::span<const LabeledCloud> clouds, const HeuristicParams& params);

enum class LocationSource { Manual, Generated };
std::string to_string(LocationSource s);

struct SourceView {
  std::shared_ptr<const TableCluster> cluster;
  Pose2 origin;  // pose the cluster was originally assigned to
};

struct SearchLocation {
  std::string id;
  Pose2 pose;
  std::string room_id;  // empty when outside every room
  LocationSource source = LocationSource::Manual;
  std::vector<SourceView> sources;

  /// Point-weighted centroid of all source clusters.
  std::optional<Vec2> source_centroid() const;
};

enum class PlacementAxis { Second, First };

/// Two poses at centroid +/- axis * (extent + d), facing the centroid.
std::vector<SearchLocation> place_search_positions(const std::shared_ptr<const TableCluster>& cluster,
                                                   const HeuristicParams& params, const WorldModel& world,
                                                   const std::string& id_prefix,
                                                   PlacementAxis axis = PlacementAxis::Second);

/// Keeps a candidate iff it is inside the grid, on a Free cell, in
/// `robot_room`, and every source cluster centroid is in `robot_room`.
std::vector<SearchLocation> filter_positions(const std::vector<SearchLocation>& candidates,
                                             const std::string& robot_room, const WorldModel& world);

struct GeneratedPositions {
  std::vector<SearchLocation> positions;
  std::size_t candidates = 0;  // before filtering, always 2 per cluster
};

/// Places and filters per cluster so that each cluster contributes a full
/// pair or nothing. A pair broken by the filters on the second axis is
/// replaced by the first-axis pair when both of those survive.
GeneratedPositions generate_positions(const std::vector<TableCluster>& clusters, const std::string& robot_room,
                                      const WorldModel& world, const HeuristicParams& params,
                                      const std::string& id_prefix);

/// Greedily merges pairs of locations whose view sectors overlap by at
/// least `min_overlap` and whose merged midpoint pose still sees every
/// source-cluster point the originals saw.
std::vector<SearchLocation> cluster_positions(const std::vector<SearchLocation>& locations, const WorldModel& world,
                                              double fov, double range, double min_overlap);

/// Fraction of the view sector of `a` that lies inside the sector of `b`.
double sector_overlap(const Pose2& a, const Pose2& b, double fov, double range);

void write_clusters_csv(std::ostream& out, const std::vector<TableCluster>& clusters);
void write_positions_csv(std::ostream& out, const std::vector<SearchLocation>& locations);

}  // namespace fetchsim
