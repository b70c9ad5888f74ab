#include "skt/model.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "skt/error.hpp"

namespace skt {

SpeciesRates rates_for(const Parameters& p, Species q) noexcept {
  if (q == Species::first) return {p.d1, p.d11, p.d12, p.a1, p.a11, p.a12};
  return {p.d2, p.d22, p.d21, p.a2, p.a22, p.a21};
}

Parameters swapped(const Parameters& p) noexcept {
  Parameters s;
  s.d1 = p.d2;
  s.d2 = p.d1;
  s.d11 = p.d22;
  s.d12 = p.d21;
  s.d21 = p.d12;
  s.d22 = p.d11;
  s.a1 = p.a2;
  s.a2 = p.a1;
  s.a11 = p.a22;
  s.a12 = p.a21;
  s.a21 = p.a12;
  s.a22 = p.a11;
  return s;
}

void validate_params(const Parameters& p) {
  if (!(p.d1 > 0.0) || !(p.d2 > 0.0)) {
    throw Error(ErrorCode::NonPositiveDiffusion, "base diffusion rates d1, d2 must be > 0");
  }
  const double rates[] = {p.d11, p.d12, p.d21, p.d22, p.a11, p.a12, p.a21, p.a22};
  for (double r : rates) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw Error(ErrorCode::NegativeRate,
                  "cross-diffusion and competition rates must be finite and >= 0");
    }
  }
  if (!std::isfinite(p.d1) || !std::isfinite(p.d2) || !std::isfinite(p.a1) ||
      !std::isfinite(p.a2)) {
    throw Error(ErrorCode::NonPositiveDiffusion, "parameters must be finite");
  }
}

void validate_grid(const GridSpec& g) {
  if (g.n < 3) throw Error(ErrorCode::InvalidGrid, "grid needs at least 3 nodes");
  if (!(g.xmin < g.xmax) || !std::isfinite(g.xmin) || !std::isfinite(g.xmax)) {
    throw Error(ErrorCode::InvalidGrid, "grid requires finite xmin < xmax");
  }
}

DensityField DensityField::zeros(const GridSpec& grid, double t) {
  DensityField f;
  f.grid = grid;
  f.t = t;
  f.u1.assign(grid.n, 0.0);
  f.u2.assign(grid.n, 0.0);
  f.v1.assign(grid.n, 0.0);
  f.v2.assign(grid.n, 0.0);
  return f;
}

std::vector<double> central_gradient(const std::vector<double>& values, double dx) {
  const std::size_t n = values.size();
  std::vector<double> g(n, 0.0);
  if (n < 2) return g;
  g.front() = (values[1] - values[0]) / dx;
  g.back() = (values[n - 1] - values[n - 2]) / dx;
  for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (values[i + 1] - values[i - 1]) / (2.0 * dx);
  return g;
}

Profile Profile::gaussian(double center, double width, double mass) {
  if (!(width > 0.0)) throw Error(ErrorCode::NonPositiveWidth, "gaussian width must be > 0");
  return Profile(Kind::gaussian, {center, width, mass});
}

Profile Profile::constant(double value) { return Profile(Kind::constant, {value}); }

Profile Profile::two_bumps(double c1, double c2, double width, double mass) {
  if (!(width > 0.0)) throw Error(ErrorCode::NonPositiveWidth, "two-bumps width must be > 0");
  return Profile(Kind::two_bumps, {c1, c2, width, mass});
}

namespace {

double gaussian_density(double x, double center, double width) {
  const double z = (x - center) / width;
  return std::exp(-0.5 * z * z) / (width * std::sqrt(2.0 * std::numbers::pi));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

Profile Profile::parse(const std::string& text) {
  const std::string s = trim(text);
  const auto open = s.find('(');
  const auto close = s.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open ||
      close != s.size() - 1) {
    throw Error(ErrorCode::InvalidConfig, "malformed initial profile '" + text + "'");
  }
  const std::string name = trim(s.substr(0, open));
  std::vector<double> args;
  std::stringstream list(s.substr(open + 1, close - open - 1));
  std::string item;
  while (std::getline(list, item, ',')) {
    const std::string t = trim(item);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
      throw Error(ErrorCode::InvalidConfig, "bad number '" + t + "' in profile '" + text + "'");
    }
    args.push_back(value);
  }
  auto expect = [&](std::size_t count) {
    if (args.size() != count) {
      throw Error(ErrorCode::InvalidConfig, "profile '" + name + "' takes " +
                                                std::to_string(count) + " arguments");
    }
  };
  if (name == "gaussian") {
    expect(3);
    return gaussian(args[0], args[1], args[2]);
  }
  if (name == "constant") {
    expect(1);
    return constant(args[0]);
  }
  if (name == "two-bumps") {
    expect(4);
    return two_bumps(args[0], args[1], args[2], args[3]);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown initial profile '" + name + "'");
}

double Profile::operator()(double x) const noexcept {
  switch (kind_) {
    case Kind::gaussian:
      return args_[2] * gaussian_density(x, args_[0], args_[1]);
    case Kind::constant:
      return args_[0];
    case Kind::two_bumps:
      return 0.5 * args_[3] *
             (gaussian_density(x, args_[0], args_[2]) + gaussian_density(x, args_[1], args_[2]));
  }
  return 0.0;
}

std::string Profile::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::gaussian: os << "gaussian("; break;
    case Kind::constant: os << "constant("; break;
    case Kind::two_bumps: os << "two-bumps("; break;
  }
  for (std::size_t i = 0; i < args_.size(); ++i) os << (i ? "," : "") << args_[i];
  os << ')';
  return os.str();
}

DensityField field_from_initial(const GridSpec& grid, const ScalarFunction& u1_0,
                                const ScalarFunction& u2_0) {
  validate_grid(grid);
  DensityField f = DensityField::zeros(grid, 0.0);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.node(i);
    f.u1[i] = u1_0(x);
    f.u2[i] = u2_0(x);
    if (!(f.u1[i] >= 0.0) || !(f.u2[i] >= 0.0) || !std::isfinite(f.u1[i]) ||
        !std::isfinite(f.u2[i])) {
      throw Error(ErrorCode::NegativeInitialData,
                  "initial data must be finite and nonnegative at every node");
    }
  }
  f.v1 = central_gradient(f.u1, grid.dx());
  f.v2 = central_gradient(f.u2, grid.dx());
  return f;
}

FieldSample interpolate(const DensityField& field, double x, std::size_t& clamps) noexcept {
  const CellPosition c = locate(field.grid, x);
  clamps += c.clamped ? 1U : 0U;
  const std::size_t i = c.i;
  return {blend(field.u1[i], field.u1[i + 1], c.w), blend(field.u2[i], field.u2[i + 1], c.w),
          blend(field.v1[i], field.v1[i + 1], c.w), blend(field.v2[i], field.v2[i + 1], c.w)};
}

FieldSample interpolate(const DensityField& field, double x) noexcept {
  std::size_t ignored = 0;
  return interpolate(field, x, ignored);
}

FieldTable::FieldTable(const DensityField& field)
    : grid_(field.grid), inv_dx_(1.0 / field.grid.dx()), last_(field.grid.n - 1),
      nodes_(field.grid.n + 1) {
  for (std::size_t i = 0; i < grid_.n; ++i) nodes_[i] = field.at_node(i);
  nodes_[grid_.n] = nodes_[last_];
}

TestFunction make_gaussian_test(double center, double width) {
  if (!(width > 0.0)) throw Error(ErrorCode::NonPositiveWidth, "test width must be > 0");
  const double s2 = width * width;
  TestFunction tf;
  tf.h = [=](double x) {
    const double z = x - center;
    return std::exp(-z * z / (2.0 * s2));
  };
  tf.grad = [=](double x) {
    const double z = x - center;
    return -z / s2 * std::exp(-z * z / (2.0 * s2));
  };
  tf.lap = [=](double x) {
    const double z = x - center;
    return (z * z / s2 - 1.0) / s2 * std::exp(-z * z / (2.0 * s2));
  };
  tf.center = center;
  tf.width = width;
  tf.support_radius = 8.0 * width;
  return tf;
}

double trapezoid(const std::vector<double>& values, double dx) {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum * dx;
}

}  // namespace skt
