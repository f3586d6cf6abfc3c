#include <renorm/partitions.hpp>

#include <renorm/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace renorm {

namespace {

constexpr std::int64_t kMaxAtoms = 10'000'000;

double frac(double x) { return x - std::floor(x); }

/// Orbit of a lift point: out[j] = F^j(x0) for 0 <= j < count.
std::vector<double> lift_orbit(const CircleLift& f, double x0,
                               std::int64_t count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  double x = x0;
  for (std::int64_t j = 0; j < count; ++j) {
    out[static_cast<std::size_t>(j)] = x;
    x = f.eval(x);
  }
  return out;
}

}  // namespace

DynamicalPartition build_partition(const CircleLift& f, int level,
                                   double tiling_tol) {
  if (level < 0) throw ValidationError("build_partition: level must be >= 0");
  if (!(tiling_tol > 0.0)) {
    throw ValidationError("build_partition: tiling_tol must be positive");
  }
  const ClosestReturns rec = closest_returns(f, level + 2);
  const std::int64_t qn = rec.q[static_cast<std::size_t>(level)];
  const std::int64_t qn1 = rec.q[static_cast<std::size_t>(level) + 1];
  const double dn = rec.d[static_cast<std::size_t>(level)];
  const double dn1 = rec.d[static_cast<std::size_t>(level) + 1];
  const std::int64_t count = qn + qn1;
  if (count > kMaxAtoms) {
    throw ValidationError("build_partition: level " + std::to_string(level) +
                          " needs " + std::to_string(count) +
                          " atoms, above the supported maximum");
  }

  DynamicalPartition part;
  part.level = level;
  part.q_wide = qn;
  part.q_narrow = qn1;
  part.next_quotient = rec.a[static_cast<std::size_t>(level) + 1];

  // Critical orbit F^j(0) determines every atom endpoint; the companion
  // orbits of the fundamental endpoints d_n, d_{n+1} give exact lengths.
  const std::vector<double> orbit = lift_orbit(f, 0.0, count);
  const std::vector<double> wide_end = lift_orbit(f, dn, qn1);
  const std::vector<double> narrow_end = lift_orbit(f, dn1, qn);

  part.atoms.reserve(static_cast<std::size_t>(count));
  // Endpoint orbit indices (lower, upper) per atom, parallel to part.atoms,
  // for the combinatorial adjacency check below.
  std::vector<std::pair<std::int64_t, std::int64_t>> ends;
  ends.reserve(static_cast<std::size_t>(count));
  for (std::int64_t j = 0; j < qn1; ++j) {
    PartitionAtom atom;
    atom.kind = AtomKind::wide;
    atom.start = j;
    const double a = orbit[static_cast<std::size_t>(j)];
    const double b = wide_end[static_cast<std::size_t>(j)];
    atom.left = frac(std::min(a, b));
    atom.length = std::abs(b - a);
    part.atoms.push_back(atom);
    ends.emplace_back(dn > 0.0 ? j : j + qn, dn > 0.0 ? j + qn : j);
  }
  for (std::int64_t j = 0; j < qn; ++j) {
    PartitionAtom atom;
    atom.kind = AtomKind::narrow;
    atom.start = j;
    const double a = orbit[static_cast<std::size_t>(j)];
    const double b = narrow_end[static_cast<std::size_t>(j)];
    atom.left = frac(std::min(a, b));
    atom.length = std::abs(b - a);
    part.atoms.push_back(atom);
    ends.emplace_back(dn1 > 0.0 ? j : j + qn1, dn1 > 0.0 ? j + qn1 : j);
  }

  // Circular sort of the orbit: rank[j] is the position of F^j(0) mod 1 in
  // increasing circle order. Every atom must occupy exactly one gap between
  // consecutive orbit points, each gap exactly once.
  std::vector<std::int64_t> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), std::int64_t{0});
  std::vector<double> pos(static_cast<std::size_t>(count));
  for (std::int64_t j = 0; j < count; ++j) {
    pos[static_cast<std::size_t>(j)] = frac(orbit[static_cast<std::size_t>(j)]);
  }
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    return pos[static_cast<std::size_t>(a)] < pos[static_cast<std::size_t>(b)];
  });
  for (std::int64_t r = 0; r + 1 < count; ++r) {
    if (pos[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] ==
        pos[static_cast<std::size_t>(order[static_cast<std::size_t>(r) + 1])]) {
      throw CombinatoricsMismatch(
          "build_partition: orbit points collide on the circle at level " +
          std::to_string(level));
    }
  }
  std::vector<std::int64_t> rank(static_cast<std::size_t>(count));
  for (std::int64_t r = 0; r < count; ++r) {
    rank[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r;
  }

  std::vector<char> used(static_cast<std::size_t>(count), 0);
  double total = 0.0;
  for (std::size_t i = 0; i < part.atoms.size(); ++i) {
    const std::int64_t lo = rank[static_cast<std::size_t>(ends[i].first)];
    const std::int64_t hi = rank[static_cast<std::size_t>(ends[i].second)];
    if ((lo + 1) % count != hi) {
      throw CombinatoricsMismatch(
          "build_partition: atom endpoints are not adjacent orbit points at "
          "level " +
          std::to_string(level));
    }
    if (used[static_cast<std::size_t>(lo)]) {
      throw CombinatoricsMismatch(
          "build_partition: two atoms occupy one orbit gap at level " +
          std::to_string(level));
    }
    used[static_cast<std::size_t>(lo)] = 1;
    // The gap length from sorted circle positions must match the length
    // obtained by lift arithmetic along the orbit.
    const double gap_lo = pos[static_cast<std::size_t>(ends[i].first)];
    const double gap_hi = pos[static_cast<std::size_t>(ends[i].second)];
    const double gap =
        (lo + 1 == count) ? 1.0 - gap_lo + gap_hi : gap_hi - gap_lo;
    if (std::abs(gap - part.atoms[i].length) > tiling_tol) {
      throw CombinatoricsMismatch(
          "build_partition: atom length disagrees with its orbit gap at "
          "level " +
          std::to_string(level));
    }
    total += part.atoms[i].length;
  }
  if (std::abs(total - 1.0) > tiling_tol) {
    throw CombinatoricsMismatch(
        "build_partition: atom lengths sum to " + std::to_string(total) +
        " instead of 1 at level " + std::to_string(level));
  }

  std::sort(part.atoms.begin(), part.atoms.end(),
            [](const PartitionAtom& a, const PartitionAtom& b) {
              return a.left < b.left;
            });
  return part;
}

AdjacencyStats adjacency_ratios(const DynamicalPartition& p) {
  AdjacencyStats stats;
  const std::size_t count = p.atoms.size();
  if (count < 2) return stats;
  stats.valid = true;
  stats.max_ratio = 0.0;
  stats.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    const double cur = p.atoms[i].length;
    const double next = p.atoms[(i + 1) % count].length;
    const double ratio = cur / next;
    stats.max_ratio = std::max(stats.max_ratio, ratio);
    stats.min_ratio = std::min(stats.min_ratio, ratio);
    stats.max_atom = std::max(stats.max_atom, cur);
  }
  return stats;
}

namespace {

/// Max/min of |Df^k| over interior samples of the lift interval [lo, hi].
double derivative_ratio(const CircleLift& f, double lo, double hi,
                        std::int64_t k, int samples) {
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = (i + 0.5) / samples;
    double x = lo + t * (hi - lo);
    double product = 1.0;
    for (std::int64_t step = 0; step < k; ++step) {
      product *= f.deriv(x, 1);
      x = f.eval(x);
    }
    dmin = std::min(dmin, std::abs(product));
    dmax = std::max(dmax, std::abs(product));
  }
  if (!(dmin > 0.0)) {
    throw CombinatoricsMismatch(
        "distortion_ratios: derivative vanished along a sampled orbit");
  }
  return dmax / dmin;
}

}  // namespace

DistortionStats distortion_ratios(const CircleLift& f, int level,
                                  int samples) {
  if (level < 0) {
    throw ValidationError("distortion_ratios: level must be >= 0");
  }
  if (samples < 1) {
    throw ValidationError("distortion_ratios: samples must be >= 1");
  }
  const ClosestReturns rec = closest_returns(f, level + 2);
  const std::int64_t qn = rec.q[static_cast<std::size_t>(level)];
  const std::int64_t qn1 = rec.q[static_cast<std::size_t>(level) + 1];
  const double dn = rec.d[static_cast<std::size_t>(level)];
  const double dn1 = rec.d[static_cast<std::size_t>(level) + 1];

  DistortionStats stats;
  stats.samples = samples;
  const double image0 = f.eval(0.0);
  // Once-iterated fundamental arcs in lift coordinates: f maps the arc
  // between 0 and d to the arc between F(0) and F(d), order preserved.
  const double wide_end = f.eval(dn);
  const double narrow_end = f.eval(dn1);
  stats.wide_ratio = derivative_ratio(f, std::min(image0, wide_end),
                                      std::max(image0, wide_end), qn1 - 1,
                                      samples);
  stats.narrow_ratio = derivative_ratio(f, std::min(image0, narrow_end),
                                        std::max(image0, narrow_end), qn - 1,
                                        samples);
  return stats;
}

RefinementReport verify_refinement(const DynamicalPartition& coarse,
                                   const DynamicalPartition& fine,
                                   double length_tol) {
  if (fine.level != coarse.level + 1) {
    throw ValidationError("verify_refinement: levels must be consecutive");
  }
  if (fine.q_wide != coarse.q_narrow ||
      fine.q_narrow !=
          coarse.next_quotient * coarse.q_narrow + coarse.q_wide) {
    throw ValidationError(
        "verify_refinement: return times disagree between levels");
  }
  const std::int64_t qn = coarse.q_wide;
  const std::int64_t qn1 = coarse.q_narrow;
  const std::int64_t a_next = coarse.next_quotient;

  // Index fine atoms by (kind, start) for combinatorial lookup.
  std::vector<double> fine_wide(static_cast<std::size_t>(fine.q_narrow), -1.0);
  std::vector<double> fine_narrow(static_cast<std::size_t>(fine.q_wide), -1.0);
  for (const PartitionAtom& atom : fine.atoms) {
    auto& slot = (atom.kind == AtomKind::wide)
                     ? fine_wide[static_cast<std::size_t>(atom.start)]
                     : fine_narrow[static_cast<std::size_t>(atom.start)];
    if (slot >= 0.0) {
      throw ValidationError("verify_refinement: duplicate fine atom");
    }
    slot = atom.length;
  }
  for (double len : fine_wide) {
    if (len < 0.0) throw ValidationError("verify_refinement: missing fine atom");
  }
  for (double len : fine_narrow) {
    if (len < 0.0) throw ValidationError("verify_refinement: missing fine atom");
  }

  RefinementReport report;
  report.pieces_per_wide_atom = a_next + 1;
  for (const PartitionAtom& atom : coarse.atoms) {
    if (atom.kind == AtomKind::narrow) {
      // f^j(I_{n+1}) persists unchanged as a wide atom of the next level.
      const double len = fine_wide[static_cast<std::size_t>(atom.start)];
      if (std::abs(len - atom.length) > length_tol) {
        throw CombinatoricsMismatch(
            "verify_refinement: persisted atom changed length");
      }
      ++report.persisted;
    } else {
      // f^j(I_n) splits into f^j(I_{n+2}) and the a_{n+1} arcs
      // f^{j + q_n + k q_{n+1}}(I_{n+1}); children must fill the parent.
      double sum = fine_narrow[static_cast<std::size_t>(atom.start)];
      for (std::int64_t k = 0; k < a_next; ++k) {
        const std::int64_t child = atom.start + qn + k * qn1;
        sum += fine_wide[static_cast<std::size_t>(child)];
      }
      if (std::abs(sum - atom.length) > length_tol) {
        throw CombinatoricsMismatch(
            "verify_refinement: children do not fill their parent atom");
      }
    }
  }
  return report;
}

}  // namespace renorm
