#pragma once

// Model parameters, the 1-D grid, density fields with gradients and the
// analytic test-function family used by the verification checks.

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace skt {

enum class Species : int { first = 1, second = 2 };

constexpr Species other(Species q) noexcept {
  return q == Species::first ? Species::second : Species::first;
}
constexpr int index_of(Species q) noexcept { return static_cast<int>(q) - 1; }

/// The twelve SKT constants. Naming follows the model: d_q base diffusion,
/// d_qi cross diffusion, a_q intrinsic growth, a_qi competition.
struct Parameters {
  double d1 = 1.0, d2 = 1.0;
  double d11 = 0.0, d12 = 0.0, d21 = 0.0, d22 = 0.0;
  double a1 = 0.0, a2 = 0.0;
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
};

/// Rates of one species split into "own" and "other" parts. Every coefficient
/// is evaluated in this order so that swapping the two species swaps results
/// bit for bit.
struct SpeciesRates {
  double d, d_own, d_other;
  double a, a_own, a_other;
};

SpeciesRates rates_for(const Parameters& p, Species q) noexcept;

/// Parameters with the roles of the two species exchanged.
Parameters swapped(const Parameters& p) noexcept;

/// Throws Error(NonPositiveDiffusion | NegativeRate).
void validate_params(const Parameters& p);

struct GridSpec {
  double xmin = -8.0;
  double xmax = 8.0;
  std::size_t n = 161;

  double dx() const noexcept { return (xmax - xmin) / static_cast<double>(n - 1); }
  double node(std::size_t i) const noexcept {
    return xmin + static_cast<double>(i) * dx();
  }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Throws Error(InvalidGrid).
void validate_grid(const GridSpec& g);

/// Values of a field at one position.
struct FieldSample {
  double u1 = 0.0, u2 = 0.0, v1 = 0.0, v2 = 0.0;

  double u(Species q) const noexcept { return q == Species::first ? u1 : u2; }
  double v(Species q) const noexcept { return q == Species::first ? v1 : v2; }
};

/// Time slice of (u1, u2, v1, v2) on a uniform grid. v holds spatial gradients.
struct DensityField {
  GridSpec grid;
  double t = 0.0;
  std::vector<double> u1, u2, v1, v2;

  static DensityField zeros(const GridSpec& grid, double t = 0.0);

  std::vector<double>& u(Species q) { return q == Species::first ? u1 : u2; }
  const std::vector<double>& u(Species q) const { return q == Species::first ? u1 : u2; }
  std::vector<double>& v(Species q) { return q == Species::first ? v1 : v2; }
  const std::vector<double>& v(Species q) const { return q == Species::first ? v1 : v2; }

  FieldSample at_node(std::size_t i) const noexcept { return {u1[i], u2[i], v1[i], v2[i]}; }
};

/// Central differences inside, one-sided first-order differences at the two ends.
std::vector<double> central_gradient(const std::vector<double>& values, double dx);

/// Named initial profile: gaussian(center,width,mass), constant(value),
/// two-bumps(c1,c2,width,mass). For two-bumps the mass is split evenly.
class Profile {
 public:
  enum class Kind { gaussian, constant, two_bumps };

  static Profile gaussian(double center, double width, double mass);
  static Profile constant(double value);
  static Profile two_bumps(double c1, double c2, double width, double mass);
  /// Throws Error(InvalidConfig) on malformed text.
  static Profile parse(const std::string& text);

  double operator()(double x) const noexcept;
  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& args() const noexcept { return args_; }
  std::string to_string() const;

 private:
  Profile(Kind kind, std::vector<double> args) : kind_(kind), args_(std::move(args)) {}
  Kind kind_;
  std::vector<double> args_;
};

using ScalarFunction = std::function<double(double)>;

/// Samples both profiles on the grid at t = 0; v by central differences.
/// Throws Error(NegativeInitialData).
DensityField field_from_initial(const GridSpec& grid, const ScalarFunction& u1_0,
                                const ScalarFunction& u2_0);

/// Cell lookup shared by every interpolating routine.
struct CellPosition {
  std::size_t i;  // left node
  double w;       // weight of node i + 1
  bool clamped;
};

inline CellPosition locate(const GridSpec& g, double x) noexcept {
  const std::size_t last = g.n - 1;
  if (!(x >= g.xmin)) return {0, 0.0, true};
  if (!(x <= g.xmax)) return {last - 1, 1.0, true};
  const double s = (x - g.xmin) / g.dx();
  double cell = std::floor(s);
  double w = s - cell;
  // Positions within rounding of a node resolve to that node exactly.
  if (w > 1.0 - 1e-12) {
    cell += 1.0;
    w = 0.0;
  } else if (w < 1e-12) {
    w = 0.0;
  }
  auto i = static_cast<std::size_t>(cell);
  if (i >= last) return {last - 1, 1.0, false};
  return {i, w, false};
}

inline double blend(double a, double b, double w) noexcept {
  return w == 1.0 ? b : a + w * (b - a);
}

/// Piecewise-linear interpolation of all four arrays. Out-of-domain positions
/// return the boundary node and increment `clamps`.
FieldSample interpolate(const DensityField& field, double x, std::size_t& clamps) noexcept;
FieldSample interpolate(const DensityField& field, double x) noexcept;

/// Node-interleaved copy of a field for the Monte Carlo inner loops.
class FieldTable {
 public:
  explicit FieldTable(const DensityField& field);

  FieldSample sample(double x, std::size_t& clamps) const noexcept {
    std::size_t i = 0;
    double w = 0.0;
    if (!(x >= grid_.xmin)) {
      ++clamps;
    } else if (!(x <= grid_.xmax)) {
      ++clamps;
      i = last_;
    } else {
      const double s = (x - grid_.xmin) * inv_dx_;
      i = static_cast<std::size_t>(s);
      if (i >= last_) {
        i = last_;
      } else {
        w = s - static_cast<double>(i);
      }
    }
    // nodes_ carries a copy of the last node so i + 1 is always valid.
    const FieldSample& a = nodes_[i];
    const FieldSample& b = nodes_[i + 1];
    return {a.u1 + w * (b.u1 - a.u1), a.u2 + w * (b.u2 - a.u2), a.v1 + w * (b.v1 - a.v1),
            a.v2 + w * (b.v2 - a.v2)};
  }
  const GridSpec& grid() const noexcept { return grid_; }

 private:
  GridSpec grid_;
  double inv_dx_;
  std::size_t last_;
  std::vector<FieldSample> nodes_;
};

/// Smooth test function with analytic first and second derivatives.
struct TestFunction {
  std::function<double(double)> h;
  std::function<double(double)> grad;
  std::function<double(double)> lap;
  double center = 0.0;
  double width = 1.0;
  double support_radius = 0.0;
};

/// h(x) = exp(-(x - center)^2 / (2 width^2)). Throws Error(NonPositiveWidth).
TestFunction make_gaussian_test(double center, double width);

/// Monte Carlo estimate of one expectation.
struct EstimatorResult {
  double mean = 0.0;
  double std_error = 0.0;  // sample std / sqrt(paths)
  std::size_t paths = 0;
  std::size_t clamps = 0;
};

/// Welford accumulator.
class RunningStats {
 public:
  void add(double x) noexcept {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double std_error() const noexcept {
    return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }
  EstimatorResult result(std::size_t clamps = 0) const noexcept {
    return {mean(), std_error(), n_, clamps};
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Composite trapezoid rule over grid-node values.
double trapezoid(const std::vector<double>& values, double dx);

}  // namespace skt
