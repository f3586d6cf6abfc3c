#pragma once

#include <renorm/maps.hpp>

#include <cstdint>
#include <vector>

namespace renorm {

/// Which fundamental interval an atom is an iterate of. At level n the
/// circle is tiled by the arcs f^j([c, f^{q_n}(c)]) for 0 <= j < q_{n+1}
/// (the wide family) together with f^j([c, f^{q_{n+1}}(c)]) for
/// 0 <= j < q_n (the narrow family), where c = 0 is the critical point.
enum class AtomKind {
  wide,
  narrow,
};

/// One atom, stored combinatorially by orbit index: the arc between the
/// orbit points f^start(c) and f^{start+span}(c), where span is q_level
/// for wide atoms and q_{level+1} for narrow ones.
struct PartitionAtom {
  AtomKind kind = AtomKind::wide;
  std::int64_t start = 0;
  /// Circle position in [0, 1) of the arc's lower endpoint.
  double left = 0.0;
  /// Arc length, computed by lift arithmetic along the orbit.
  double length = 0.0;
};

/// Level-n dynamical partition of the circle determined by the critical
/// orbit {f^j(0): 0 <= j <= q_n + q_{n+1} - 1}. Atoms are sorted by
/// circle position; the first atom has left endpoint 0.
struct DynamicalPartition {
  int level = 0;
  /// Return times q_n and q_{n+1} (spans of wide and narrow atoms).
  std::int64_t q_wide = 0;
  std::int64_t q_narrow = 0;
  /// Partial quotient a_{n+1}, used by the refinement rule.
  std::int64_t next_quotient = 0;
  std::vector<PartitionAtom> atoms;
};

/// Summary statistics over circularly adjacent atom pairs.
struct AdjacencyStats {
  /// False for degenerate partitions with fewer than two atoms.
  bool valid = false;
  /// Extremes of length(atom) / length(next atom) over the circle.
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  /// Longest atom in the partition.
  double max_atom = 0.0;
};

/// Distortion of the long first-return compositions over sampled points:
/// max/min over samples of |Df^k(x)|, one record per fundamental arc.
struct DistortionStats {
  /// Df^{q_{n+1}-1} sampled on f([c, f^{q_n}(c)]).
  double wide_ratio = 1.0;
  /// Df^{q_n-1} sampled on f([c, f^{q_{n+1}}(c)]).
  double narrow_ratio = 1.0;
  int samples = 0;
};

/// Builds the level-n dynamical partition of the unit circle for a lift
/// with irrational-typed rotation number. Verifies the tiling: atom count
/// q_n + q_{n+1}, endpoint indices circularly adjacent along the sorted
/// critical orbit, and total length 1 within tiling_tol.
///
/// Throws CombinatoricsMismatch if the tiling fails, ValidationError for
/// a level whose orbit piece would be unreasonably large.
DynamicalPartition build_partition(const CircleLift& f, int level,
                                   double tiling_tol = 1e-9);

/// Adjacent-length ratios of a partition; valid=false when fewer than two
/// atoms are present.
AdjacencyStats adjacency_ratios(const DynamicalPartition& p);

/// Max/min ratio of |Df^k| over deterministic interior samples of the
/// once-iterated fundamental arcs (k = q_{n+1}-1 on f(I_n) and
/// k = q_n-1 on f(I_{n+1})). Rigid rotations give exactly 1.
DistortionStats distortion_ratios(const CircleLift& f, int level,
                                  int samples = 32);

/// Report of the structural transition from level n to level n+1.
struct RefinementReport {
  /// Narrow atoms of the coarse partition that persist unchanged.
  std::int64_t persisted = 0;
  /// Pieces each wide atom splits into (a_{n+1} + 1).
  std::int64_t pieces_per_wide_atom = 0;
};

/// Verifies that `fine` refines `coarse` according to the transition rule:
/// every narrow atom of `coarse` persists, and every wide atom splits into
/// a_{n+1}+1 children whose lengths sum to the parent's within length_tol.
/// The assignment of children to parents is purely combinatorial.
///
/// Throws ValidationError if levels are not consecutive or the partitions
/// disagree combinatorially, CombinatoricsMismatch if a length check fails.
RefinementReport verify_refinement(const DynamicalPartition& coarse,
                                   const DynamicalPartition& fine,
                                   double length_tol = 1e-9);

}  // namespace renorm
