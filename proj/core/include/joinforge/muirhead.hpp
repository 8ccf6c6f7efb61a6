#pragma once

// Symmetric sums over S_m and their normalizing constants
//
//   sum_{sigma in S_m} x_{sigma(1)}^{a_1} ... x_{sigma(m)}^{a_m}
//       <= K(m; a) (x_1 + ... + x_m)^s,   s = a_1 + ... + a_m,
//
// with the convention 0^0 = 1.

#include <span>
#include <string>
#include <vector>

namespace joinforge {

class MuirheadSpec {
 public:
  // m = a.size() >= 1 and every a_i >= 0; throws UsageError otherwise.
  explicit MuirheadSpec(std::vector<double> a);

  int m() const { return static_cast<int>(a_.size()); }
  std::span<const double> a() const { return a_; }
  double s() const { return s_; }

 private:
  std::vector<double> a_;
  double s_;
};

// Exact sum over all m! permutations. Requires x.size() == m.
double symmetric_sum(std::span<const double> x, const MuirheadSpec& spec);

enum class MuirheadCase { i, ii, iii, iv };
std::string to_string(MuirheadCase c);

// Exact value for cases i, iii and iv; for case ii only the bracket
// [m! m^-s, (m-1)!] is known and `value` holds the lower end.
struct MuirheadClosedForm {
  MuirheadCase which = MuirheadCase::ii;
  bool exact = false;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Requires s > 0.
MuirheadClosedForm muirhead_closed_form(const MuirheadSpec& spec);

// Grid search over the probability simplex followed by pattern-search
// refinement. `value` is attained at `argmax`, hence a lower bound on K.
// `uncertainty` bounds K - value assuming the sum is Lipschitz with the
// largest slope seen between neighbouring grid points; `coarse` marks
// estimates whose uncertainty exceeds a tenth of the value.
struct MuirheadEstimate {
  double value = 0.0;
  double uncertainty = 0.0;
  std::vector<double> argmax;
  int resolution = 0;
  bool coarse = false;
};

// Supports m <= 5. resolution <= 0 picks a default per m (grid steps per unit).
MuirheadEstimate muirhead_numeric(const MuirheadSpec& spec, int resolution = 0);
int default_muirhead_resolution(int m);

// cosh((r - q) theta) / cosh(theta)^(r + q), evaluated in the log domain.
double cosh_ratio(double r, double q, double theta);

// True when (r - q)^2 <= r + q, where the ratio never exceeds 1.
bool cosh_ratio_condition(double r, double q);
// The ratio is identically 1 on (0,0), (1,0) and (0,1); everywhere else in
// the condition region it is strictly below 1 for theta != 0.
bool cosh_ratio_degenerate(double r, double q);

}  // namespace joinforge
