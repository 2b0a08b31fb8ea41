#include "stackbandit/geometry.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>

namespace stackbandit {

void require_finite(const RealVector& v, std::string_view what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

RealVector unit_vector(Eigen::Index d, Eigen::Index axis) {
  RealVector e = RealVector::Zero(d);
  e(axis) = 1.0;
  return e;
}

RealVector project_to_ball(const RealVector& v, double radius) {
  require_finite(v, "project_to_ball");
  if (!(radius > 0.0)) throw std::invalid_argument("project_to_ball: radius must be positive");
  const double n = v.norm();
  // The slack keeps the map idempotent: a rescaled vector can land a few ulps
  // above the radius.
  if (n <= radius * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) return v;
  return v * (radius / n);
}

RealVector project_to_sphere(const RealVector& v) {
  require_finite(v, "project_to_sphere");
  if (v.size() == 0) throw std::invalid_argument("project_to_sphere: empty vector");
  const double n = v.norm();
  if (n <= 1e-12) return unit_vector(v.size(), 0);
  return v / n;
}

RealVector sample_uniform_sphere(RandomSource& rng, Eigen::Index d) {
  if (d < 1) throw std::invalid_argument("sample_uniform_sphere: d must be >= 1");
  RealVector g(d);
  double n = 0.0;
  do {
    for (Eigen::Index i = 0; i < d; ++i) g(i) = rng.normal();
    n = g.norm();
  } while (n < 1e-300);
  return g / n;
}

RealVector sample_uniform_ball(RandomSource& rng, Eigen::Index d) {
  RealVector u = sample_uniform_sphere(rng, d);
  return u * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
}

double cap_probability(Eigen::Index d, double zeta) {
  if (d < 2) throw std::invalid_argument("cap_probability: d must be >= 2");
  if (zeta >= 1.0) return 0.0;
  if (zeta <= -1.0) return 1.0;
  const double a = 0.5 * static_cast<double>(d - 1);
  const double tail = 0.5 * boost::math::ibeta(a, 0.5, 1.0 - zeta * zeta);
  return zeta >= 0.0 ? tail : 1.0 - tail;
}

namespace {

void require_unit(const RealVector& c, std::string_view what) {
  require_finite(c, what);
  if (std::abs(c.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument(std::string(what) + ": center must have unit norm");
  }
}

RealVector random_tangent(RandomSource& rng, const RealVector& center) {
  for (;;) {
    RealVector g = sample_uniform_sphere(rng, center.size());
    g -= g.dot(center) * center;
    const double n = g.norm();
    if (n > 1e-9) return g / n;
  }
}

}  // namespace

RealVector sample_uniform_cap(RandomSource& rng, const RealVector& center, double zeta) {
  require_unit(center, "sample_uniform_cap");
  const Eigen::Index d = center.size();
  if (d < 2) throw std::invalid_argument("sample_uniform_cap: d must be >= 2");
  if (!(zeta < 1.0)) throw std::invalid_argument("sample_uniform_cap: zeta must be < 1");
  if (cap_probability(d, zeta) > 0.25) {
    for (;;) {
      RealVector u = sample_uniform_sphere(rng, d);
      if (u.dot(center) >= zeta) return u;
    }
  }
  // Small cap: polar angle density is proportional to sin^{d-2}(phi). Propose
  // from phi^{d-2} on [0, phi_max] and accept with (sin(phi)/phi)^{d-2}.
  const double phi_max = std::acos(zeta);
  const double dm2 = static_cast<double>(d - 2);
  double phi = 0.0;
  for (;;) {
    phi = phi_max * std::pow(rng.uniform(), 1.0 / (dm2 + 1.0));
    const double ratio = phi > 0.0 ? std::sin(phi) / phi : 1.0;
    if (rng.uniform() <= std::pow(ratio, dm2)) break;
  }
  RealVector u = std::cos(phi) * center + std::sin(phi) * random_tangent(rng, center);
  u.normalize();
  if (u.dot(center) < zeta) u = center;  // guards rounding at phi == phi_max
  return u;
}

Net::Net(std::vector<RealVector> points, double separation, NetDomain domain)
    : points_(std::move(points)), separation_(separation), domain_(std::move(domain)) {
  if (points_.empty()) throw std::invalid_argument("Net: empty point set");
  if (!(separation_ > 0.0)) throw std::invalid_argument("Net: separation must be positive");
}

bool Net::in_domain(const RealVector& v, double tol) const {
  if (v.size() != dim()) return false;
  if (std::abs(v.norm() - 1.0) > tol) return false;
  if (const auto* cap = std::get_if<CapDomain>(&domain_)) {
    return v.dot(cap->center) >= cap->zeta - tol;
  }
  return true;
}

std::pair<std::size_t, double> Net::nearest(const RealVector& v) const {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double d2 = (points_[i] - v).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return {best, std::sqrt(best_d2)};
}

namespace {

constexpr Eigen::Index kMaxIndexed = 5;

// Grid index over the projections onto the rows of `frame` (orthonormal, at
// most kMaxIndexed). Projections never increase distances, so two points within eps
// differ by at most one cell per indexed axis. Small grids use a dense cell
// array with per-point chains, larger ones a hash map. Accepted points are
// kept in one flat array.
class PackingIndex {
 public:
  PackingIndex(Eigen::Index dim, double eps, const RealMatrix& frame) : dim_(dim), eps_(eps), eps2_(eps * eps) {
    per_axis_ = static_cast<long>(std::ceil(2.0 / eps)) + 3;
    bucketed_ = per_axis_ < 65536;
    // Beyond four axes, index only as many as the dense grid can hold.
    indexed_ = std::min<Eigen::Index>(frame.rows(), kMaxIndexed);
    while (indexed_ > 4 && std::pow(static_cast<double>(per_axis_), static_cast<double>(indexed_)) > kDenseCells) {
      --indexed_;
    }
    frame_ = frame.topRows(indexed_);
    const double cells = std::pow(static_cast<double>(per_axis_), static_cast<double>(indexed_));
    if (bucketed_ && cells <= kDenseCells) head_.assign(static_cast<std::size_t>(cells), kNone);
  }

  bool far_from_all(const RealVector& c) const {
    if (!bucketed_) {
      for (std::size_t i = 0; i < count_; ++i) {
        if (close(i, c)) return false;
      }
      return true;
    }
    const std::array<long, kMaxIndexed> base = cells(c);
    std::array<long, kMaxIndexed> offset{};
    const long combos = ipow3(indexed_);
    // Digit value 0 maps to the sample's own cell, so the first cell visited
    // is the one most likely to hold a blocking point.
    for (long m = 0; m < combos; ++m) {
      long rem = m;
      for (Eigen::Index j = 0; j < indexed_; ++j) {
        const long digit = rem % 3;
        offset[j] = base[j] + (digit == 0 ? 0 : (digit == 1 ? -1 : 1));
        rem /= 3;
      }
      const std::uint64_t k = key(offset);
      if (!head_.empty()) {
        for (std::uint32_t idx = head_[k]; idx != kNone; idx = next_[idx]) {
          if (close(idx, c)) return false;
        }
        continue;
      }
      const auto it = buckets_.find(k);
      if (it == buckets_.end()) continue;
      for (std::uint32_t idx : it->second) {
        if (close(idx, c)) return false;
      }
    }
    return true;
  }

  void add(const RealVector& c) {
    coords_.insert(coords_.end(), c.data(), c.data() + dim_);
    const auto idx = static_cast<std::uint32_t>(count_);
    if (bucketed_) {
      const std::uint64_t k = key(cells(c));
      if (!head_.empty()) {
        next_.push_back(head_[k]);
        head_[k] = idx;
      } else {
        buckets_[k].push_back(idx);
      }
    }
    ++count_;
  }

 private:
  static constexpr std::uint32_t kNone = 0xffffffffu;
  static constexpr double kDenseCells = 1 << 24;

  bool close(std::size_t idx, const RealVector& c) const {
    const double* p = coords_.data() + idx * static_cast<std::size_t>(dim_);
    double d2 = 0.0;
    for (Eigen::Index j = 0; j < dim_; ++j) {
      const double diff = p[j] - c(j);
      d2 += diff * diff;
    }
    return d2 <= eps2_;
  }
  static long ipow3(Eigen::Index n) {
    long r = 1;
    for (Eigen::Index i = 0; i < n; ++i) r *= 3;
    return r;
  }
  // Cell indices are shifted by one so that neighbors of edge cells stay
  // nonnegative.
  std::array<long, kMaxIndexed> cells(const RealVector& c) const {
    std::array<long, kMaxIndexed> k{};
    for (Eigen::Index j = 0; j < indexed_; ++j) {
      k[j] = static_cast<long>(std::floor((frame_.row(j).dot(c) + 1.0) / eps_)) + 1;
    }
    return k;
  }
  std::uint64_t key(const std::array<long, kMaxIndexed>& k) const {
    std::uint64_t out = 0;
    for (Eigen::Index j = 0; j < indexed_; ++j) {
      out = out * static_cast<std::uint64_t>(per_axis_) + static_cast<std::uint64_t>(k[j]);
    }
    return out;
  }

  Eigen::Index dim_;
  double eps_;
  double eps2_;
  Eigen::Index indexed_ = 0;
  RealMatrix frame_;
  long per_axis_ = 0;
  bool bucketed_ = true;
  std::size_t count_ = 0;
  std::vector<double> coords_;
  std::vector<std::uint32_t> head_;
  std::vector<std::uint32_t> next_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

Net greedy_pack(Eigen::Index dim, double eps, const std::function<RealVector()>& sample,
                const NetOptions& options, NetDomain domain, const RealMatrix& frame) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("net: eps must be positive");
  if (!(options.failure_factor > 0.0)) throw std::invalid_argument("net: failure_factor must be positive");
  std::vector<RealVector> pts;
  PackingIndex index(dim, eps, frame);
  double failures = 0.0;
  for (;;) {
    const double limit = options.failure_factor * static_cast<double>(std::max<std::size_t>(1, pts.size()));
    if (!pts.empty() && failures >= limit) break;
    RealVector c = sample();
    if (index.far_from_all(c)) {
      if (pts.size() >= options.max_points) {
        throw NetSizeError("net: size cap of " + std::to_string(options.max_points) +
                           " points exceeded (eps=" + std::to_string(eps) + ")");
      }
      index.add(c);
      pts.push_back(std::move(c));
      failures = 0.0;
    } else {
      failures += 1.0;
    }
  }
  return Net(std::move(pts), eps, std::move(domain));
}

}  // namespace

Net build_net_sphere(Eigen::Index d, double eps, RandomSource& rng, const NetOptions& options) {
  if (d < 2) throw std::invalid_argument("build_net_sphere: d must be >= 2");
  const RealMatrix frame = RealMatrix::Identity(std::min<Eigen::Index>(d, kMaxIndexed), d);
  return greedy_pack(d, eps, [&] { return sample_uniform_sphere(rng, d); }, options, SphereDomain{}, frame);
}

Net build_net_cap(const RealVector& center, double zeta, double eps, RandomSource& rng,
                  const NetOptions& options) {
  require_unit(center, "build_net_cap");
  if (center.size() < 2) throw std::invalid_argument("build_net_cap: d must be >= 2");
  if (!(zeta > -1.0 && zeta < 1.0)) throw std::invalid_argument("build_net_cap: zeta must lie in (-1, 1)");
  // Index on directions orthogonal to the center, along which a cap spreads.
  const Eigen::Index d = center.size();
  const RealMatrix q = Eigen::HouseholderQR<RealMatrix>(RealMatrix(center)).householderQ();
  const Eigen::Index k = std::min<Eigen::Index>(d - 1, kMaxIndexed);
  const RealMatrix frame = q.middleCols(1, k).transpose();
  return greedy_pack(d, eps, [&] { return sample_uniform_cap(rng, center, zeta); }, options, CapDomain{center, zeta},
                     frame);
}

Net reflect_cap_net(const Net& net, const RealVector& center) {
  const auto* cap = std::get_if<CapDomain>(&net.domain());
  if (cap == nullptr) throw std::invalid_argument("reflect_cap_net: net is not a cap net");
  if (center.size() != net.dim()) throw std::invalid_argument("reflect_cap_net: dimension mismatch");
  const RealVector target = project_to_sphere(center);
  const RealVector v = cap->center - target;
  const double vv = v.squaredNorm();
  std::vector<RealVector> out;
  out.reserve(net.size());
  for (const RealVector& p : net.points()) {
    RealVector q = vv > 1e-30 ? RealVector(p - (2.0 * v.dot(p) / vv) * v) : p;
    q.normalize();
    out.push_back(std::move(q));
  }
  return Net(std::move(out), net.separation(), CapDomain{target, cap->zeta});
}

}  // namespace stackbandit
