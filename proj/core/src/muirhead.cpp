#include "joinforge/muirhead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "joinforge/error.hpp"

namespace joinforge {

namespace {

constexpr double kCaseTolerance = 1e-12;

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

double log_cosh(double x) {
  const double ax = std::fabs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

// Value of the symmetric sum with (x_i)^(a_j) precomputed.
class SymmetricSummer {
 public:
  explicit SymmetricSummer(const MuirheadSpec& spec)
      : spec_(spec), m_(static_cast<std::size_t>(spec.m())), powers_(m_ * m_) {
    perm_.resize(m_);
  }

  double operator()(std::span<const double> x) {
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < m_; ++j) powers_[i * m_ + j] = std::pow(x[i], spec_.a()[j]);
    }
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    double total = 0.0;
    do {
      double term = 1.0;
      for (std::size_t j = 0; j < m_; ++j) term *= powers_[perm_[j] * m_ + j];
      total += term;
    } while (std::next_permutation(perm_.begin(), perm_.end()));
    return total;
  }

 private:
  const MuirheadSpec& spec_;
  std::size_t m_;
  std::vector<double> powers_;
  std::vector<std::size_t> perm_;
};

// Moves mass between pairs of coordinates while any move improves the value.
// The step grows after a success so that ridges are not crawled at a tiny
// step; the round cap bounds the cost when the ridge is curved.
double refine(SymmetricSummer& eval, std::vector<double>& x, double value, double step) {
  const std::size_t m = x.size();
  const double largest = step;
  std::vector<double> trial(m);
  for (int round = 0; round < 20000 && step > 1e-14; ++round) {
    bool improved = false;
    for (std::size_t to = 0; to < m; ++to) {
      for (std::size_t from = 0; from < m; ++from) {
        if (to == from || x[from] <= 0.0) continue;
        const double delta = std::min(step, x[from]);
        trial = x;
        trial[to] += delta;
        trial[from] -= delta;
        const double v = eval(trial);
        if (v > value) {
          value = v;
          x = trial;
          improved = true;
        }
      }
    }
    step = improved ? std::min(2.0 * step, largest) : 0.5 * step;
  }
  return value;
}

}  // namespace

MuirheadSpec::MuirheadSpec(std::vector<double> a) : a_(std::move(a)), s_(0.0) {
  if (a_.empty()) throw UsageError("Muirhead constant needs m >= 1 exponents");
  for (double v : a_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw UsageError("Muirhead exponents must be finite and >= 0");
    s_ += v;
  }
}

double symmetric_sum(std::span<const double> x, const MuirheadSpec& spec) {
  if (static_cast<int>(x.size()) != spec.m()) {
    throw UsageError("symmetric_sum needs " + std::to_string(spec.m()) + " variables, got " +
                     std::to_string(x.size()));
  }
  SymmetricSummer eval(spec);
  return eval(x);
}

std::string to_string(MuirheadCase c) {
  switch (c) {
    case MuirheadCase::i: return "i";
    case MuirheadCase::ii: return "ii";
    case MuirheadCase::iii: return "iii";
    case MuirheadCase::iv: return "iv";
  }
  return "?";
}

MuirheadClosedForm muirhead_closed_form(const MuirheadSpec& spec) {
  const int m = spec.m();
  const double s = spec.s();
  if (!(s > 0.0)) throw UsageError("Muirhead constant needs a positive exponent sum");
  const double balanced = factorial(m) * std::pow(static_cast<double>(m), -s);

  MuirheadClosedForm out;
  out.lower = balanced;
  out.upper = factorial(m - 1);
  if (s <= 1.0) {
    out = {MuirheadCase::i, true, balanced, balanced, balanced};
    return out;
  }
  const double floor = (s - 1.0) / m;
  const auto a = spec.a();
  if (std::all_of(a.begin(), a.end(), [&](double ai) { return ai >= floor - kCaseTolerance * s; })) {
    out = {MuirheadCase::iii, true, balanced, balanced, balanced};
    return out;
  }
  if (m == 2) {
    const double diff = a[0] - a[1];
    if (diff * diff <= s + kCaseTolerance * std::max(1.0, s * s)) {
      const double value = std::pow(2.0, 1.0 - s);
      out = {MuirheadCase::iv, true, value, value, value};
      return out;
    }
  }
  out.which = MuirheadCase::ii;
  out.exact = false;
  out.value = out.lower;
  return out;
}

int default_muirhead_resolution(int m) {
  switch (m) {
    case 1: return 1;
    case 2: return 4000;
    case 3: return 240;
    case 4: return 60;
    default: return 24;
  }
}

MuirheadEstimate muirhead_numeric(const MuirheadSpec& spec, int resolution) {
  const int m = spec.m();
  if (m > 5) throw UsageError("numeric Muirhead estimate supports m <= 5, got " + std::to_string(m));
  const int n = resolution > 0 ? resolution : default_muirhead_resolution(m);

  SymmetricSummer eval(spec);
  MuirheadEstimate out;
  out.resolution = n;
  if (m == 1) {
    out.value = 1.0;
    out.argmax = {1.0};
    return out;
  }

  // Grid values over compositions of n, addressed by the first m - 1 parts.
  const std::size_t dims = static_cast<std::size_t>(m - 1);
  const std::size_t side = static_cast<std::size_t>(n) + 1;
  std::size_t cells = 1;
  for (std::size_t i = 0; i < dims; ++i) cells *= side;
  std::vector<double> grid(cells, -1.0);
  std::vector<int> parts(dims, 0);
  std::vector<double> x(static_cast<std::size_t>(m));

  auto encode = [&](const std::vector<int>& p) {
    std::size_t code = 0;
    for (std::size_t i = 0; i < dims; ++i) code = code * side + static_cast<std::size_t>(p[i]);
    return code;
  };

  using Candidate = std::pair<double, std::vector<int>>;
  std::vector<Candidate> best;
  constexpr std::size_t kKeep = 8;
  const double inv = 1.0 / n;
  for (bool more = true; more;) {
    const int used = std::accumulate(parts.begin(), parts.end(), 0);
    if (used <= n) {
      for (std::size_t i = 0; i < dims; ++i) x[i] = parts[i] * inv;
      x[dims] = (n - used) * inv;
      const double v = eval(x);
      grid[encode(parts)] = v;
      if (best.size() < kKeep || v > best.back().first) {
        best.emplace_back(v, parts);
        std::sort(best.begin(), best.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
        if (best.size() > kKeep) best.pop_back();
      }
    }
    more = false;
    for (std::size_t i = dims; i-- > 0;) {
      if (++parts[i] <= n) {
        more = true;
        break;
      }
      parts[i] = 0;
    }
  }

  // Largest change between grid neighbours (one unit moved between two
  // coordinates, an L1 step of 2/n) gives the slope estimate.
  double slope = 0.0;
  for (std::size_t code = 0; code < cells; ++code) {
    if (grid[code] < 0.0) continue;
    std::size_t rest = code;
    for (std::size_t i = dims; i-- > 0;) {
      parts[i] = static_cast<int>(rest % side);
      rest /= side;
    }
    const int used = std::accumulate(parts.begin(), parts.end(), 0);
    for (std::size_t i = 0; i < dims; ++i) {
      // Move a unit from the implicit last coordinate into coordinate i.
      if (used < n) {
        parts[i] += 1;
        const double v = grid[encode(parts)];
        parts[i] -= 1;
        slope = std::max(slope, std::fabs(v - grid[code]) * n / 2.0);
      }
      for (std::size_t j = i + 1; j < dims; ++j) {
        if (parts[j] == 0) continue;
        parts[i] += 1;
        parts[j] -= 1;
        const double v = grid[encode(parts)];
        parts[i] -= 1;
        parts[j] += 1;
        slope = std::max(slope, std::fabs(v - grid[code]) * n / 2.0);
      }
    }
  }
  const double grid_max = best.front().first;

  std::vector<std::vector<double>> starts;
  for (const auto& [value, p] : best) {
    std::vector<double> start(static_cast<std::size_t>(m));
    const int used = std::accumulate(p.begin(), p.end(), 0);
    for (std::size_t i = 0; i < dims; ++i) start[i] = p[i] * inv;
    start[dims] = (n - used) * inv;
    starts.push_back(std::move(start));
  }
  starts.emplace_back(static_cast<std::size_t>(m), 1.0 / m);

  out.value = -1.0;
  for (std::vector<double>& start : starts) {
    refine(eval, start, eval(start), inv);
    // Pairwise moves drift off the simplex by rounding; project back.
    const double total = std::accumulate(start.begin(), start.end(), 0.0);
    for (double& xi : start) xi /= total;
    const double v = eval(start);
    if (v > out.value) {
      out.value = v;
      out.argmax = start;
    }
  }
  out.uncertainty = std::max(0.0, grid_max + slope * m * inv - out.value);
  out.coarse = out.uncertainty > 0.1 * out.value;
  return out;
}

double cosh_ratio(double r, double q, double theta) {
  return std::exp(log_cosh((r - q) * theta) - (r + q) * log_cosh(theta));
}

bool cosh_ratio_condition(double r, double q) { return (r - q) * (r - q) <= r + q; }

bool cosh_ratio_degenerate(double r, double q) {
  return (r == 0.0 && q == 0.0) || (r == 1.0 && q == 0.0) || (r == 0.0 && q == 1.0);
}

}  // namespace joinforge
