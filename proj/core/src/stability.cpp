#include "gred/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace gred {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool strictly_less(double a, double b) { return a < b - kStrictGuard; }

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

// num / den, where a non-positive denominator means the bound never binds.
double bound_ratio(double num, double den) { return den > 0.0 ? num / den : kInf; }

double invariance_w_bound(const NormalizedModel& m) {
  return (m.theta_r() - m.theta_l()) / (1.0 - m.theta_l());
}

// Interior grid point i of n over the open core.
double core_grid_point(const NormalizedModel& m, int i, int n) {
  return m.theta_l() + (m.theta_r() - m.theta_l()) * (i + 0.5) / n;
}

// Smallest f' over (theta_l, upper), limits included.
double min_core_slope(const NormalizedModel& m, double upper) {
  double lowest = m.core_derivative(m.theta_l());
  for (int i = 0; i < kCoreGridPoints; ++i) {
    const double x = core_grid_point(m, i, kCoreGridPoints);
    if (x >= upper) break;
    lowest = std::min(lowest, m.core_derivative(x));
  }
  if (upper >= m.theta_r()) lowest = std::min(lowest, m.core_derivative(m.theta_r()));
  return lowest;
}

double locate_minimum(const NormalizedModel& m, double lo, double hi) {
  // f'(lo) < 0 < f'(hi)
  for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (m.core_derivative(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ShapeClass classify_shape(const NormalizedModel& m) {
  ShapeClass out;
  ShapeEvidence& ev = out.evidence;
  ev.slope_left = m.core_derivative(m.theta_l());
  ev.slope_right = m.core_derivative(m.theta_r());
  ev.convex = convexity_pointwise(m);
  ev.min_slope = std::min(ev.slope_left, ev.slope_right);
  ev.max_slope = std::max(ev.slope_left, ev.slope_right);

  if (ev.convex) {
    // f' is strictly increasing on the core.
    if (ev.slope_left >= 0.0) {
      out.kind = ShapeKind::StrictlyIncreasing;
    } else if (ev.slope_right <= 0.0) {
      out.kind = ShapeKind::StrictlyDecreasing;
    } else {
      out.kind = ShapeKind::UnimodalMin;
      ev.sign_changes = 1;
      out.x_c = locate_minimum(m, m.theta_l(), m.theta_r());
    }
    return out;
  }

  ev.sampled = true;
  std::vector<double> xs;
  std::vector<double> slopes;
  xs.reserve(kCoreGridPoints + 2);
  slopes.reserve(kCoreGridPoints + 2);
  xs.push_back(m.theta_l());
  slopes.push_back(ev.slope_left);
  for (int i = 0; i < kCoreGridPoints; ++i) {
    const double x = core_grid_point(m, i, kCoreGridPoints);
    xs.push_back(x);
    slopes.push_back(m.core_derivative(x));
  }
  xs.push_back(m.theta_r());
  slopes.push_back(ev.slope_right);

  int last_sign = 0;
  std::size_t last_index = 0;
  std::size_t change_at = 0;
  int first_change_direction = 0;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    ev.min_slope = std::min(ev.min_slope, slopes[i]);
    ev.max_slope = std::max(ev.max_slope, slopes[i]);
    const int sign = (slopes[i] > 0.0) - (slopes[i] < 0.0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) {
      if (ev.sign_changes == 0) {
        change_at = last_index;
        first_change_direction = sign;
      }
      ++ev.sign_changes;
    }
    last_sign = sign;
    last_index = i;
  }

  if (ev.sign_changes == 0) {
    out.kind = ev.max_slope > 0.0 ? ShapeKind::StrictlyIncreasing : ShapeKind::StrictlyDecreasing;
  } else if (ev.sign_changes == 1 && first_change_direction > 0) {
    out.kind = ShapeKind::UnimodalMin;
    std::size_t next = change_at + 1;
    while (next < slopes.size() && !(slopes[next] > 0.0)) ++next;
    out.x_c = locate_minimum(m, xs[change_at], xs[next]);
  } else {
    out.kind = ShapeKind::Unclassified;
  }
  return out;
}

CoreInvariance core_invariance(const NormalizedModel& m, const ShapeClass& shape) {
  const double tl = m.theta_l();
  const double tr = m.theta_r();
  const double left_limit = (1.0 - m.w()) * tl + m.w();
  const double right_limit = m.value_left_of_theta_r();

  CoreInvariance out;
  const double limit_lo = std::min(left_limit, right_limit);
  const double limit_hi = std::max(left_limit, right_limit);
  out.image_sup = limit_hi;
  out.image_inf = limit_lo;

  switch (shape.kind) {
    case ShapeKind::StrictlyIncreasing:
    case ShapeKind::StrictlyDecreasing:
      // Image is the open interval between the two limits.
      out.invariant = limit_lo >= tl && limit_hi <= tr;
      break;
    case ShapeKind::UnimodalMin: {
      const double attained = m.core_value(*shape.x_c);
      out.image_inf = std::min(attained, limit_lo);
      out.invariant = strictly_less(tl, attained) && limit_hi <= tr;
      break;
    }
    case ShapeKind::Unclassified: {
      double lo = kInf;
      double hi = -kInf;
      for (int i = 0; i < kCoreGridPoints; ++i) {
        const double v = m.core_value(core_grid_point(m, i, kCoreGridPoints));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      out.image_inf = std::min(lo, limit_lo);
      out.image_sup = std::max(hi, limit_hi);
      out.invariant = strictly_less(tl, lo) && strictly_less(hi, tr) && limit_lo >= tl &&
                      limit_hi <= tr;
      break;
    }
  }
  return out;
}

CoreInvariance core_invariance(const NormalizedModel& m) {
  return core_invariance(m, classify_shape(m));
}

bool core_invariant(const NormalizedModel& m) { return core_invariance(m).invariant; }

bool endpoints_not_2cycle(const NormalizedModel& m) {
  return std::abs(m.theta_l() + m.theta_r() - 1.0) > 1e-12;
}

bool convexity_sufficient(const NormalizedModel& m) {
  const double a = m.shape().alpha();
  const double b = m.shape().beta();
  const double z_r = m.z_of(m.theta_r());
  return a <= b ? z_r <= a / (a + b) : z_r <= (a + 2.0) / (a + b + 4.0);
}

bool convexity_pointwise(const NormalizedModel& m) {
  const BetaShape& shape = m.shape();
  for (int i = 0; i < kCoreGridPoints; ++i) {
    const double z = m.z_of(core_grid_point(m, i, kCoreGridPoints));
    if (z <= 0.0 || z >= 1.0) continue;
    if (!(3.0 * inc_beta_j(shape, z) - 2.0 * inc_beta_h(shape, z) > 0.0)) return false;
  }
  return true;
}

double monotonicity_w_threshold(const NormalizedModel& m) {
  const double width = m.theta_r() - m.theta_l();
  return width / (width + 1.0 - m.excess());
}

double decreasing_core_w_bound(const NormalizedModel& m) {
  const double width = m.theta_r() - m.theta_l();
  return std::min(invariance_w_bound(m), bound_ratio(width, m.theta_r() - m.excess()));
}

double unimodal_right_w_bound(const NormalizedModel& m, double x_star) {
  return std::min(invariance_w_bound(m),
                  bound_ratio(x_star - m.theta_l(), x_star - m.excess()));
}

double contraction_ratio(const NormalizedModel& m, double x_star) {
  return (1.0 - m.derivative(x_star)) / m.w();
}

double convex_unimodal_right_w_bound(const NormalizedModel& m, double x_star) {
  const double ratio = contraction_ratio(m, x_star);
  const double slack = positive_part(m.theta_l() - m.excess()) / ratio;
  return std::min(invariance_w_bound(m),
                  bound_ratio(x_star - m.theta_l() + slack, x_star - m.excess()));
}

std::string to_string(Certificate c) {
  switch (c) {
    case Certificate::None: return "None";
    case Certificate::MonotoneIncreasing: return "MonotoneIncreasing";
    case Certificate::MonotoneDecreasing: return "MonotoneDecreasing";
    case Certificate::ConvexDecreasing: return "ConvexDecreasing";
    case Certificate::UnimodalMinLeft: return "UnimodalMinLeft";
    case Certificate::UnimodalMinRight: return "UnimodalMinRight";
    case Certificate::ConvexUnimodalRight: return "ConvexUnimodalRight";
  }
  return "None";
}

std::string to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::StrictlyIncreasing: return "StrictlyIncreasing";
    case ShapeKind::StrictlyDecreasing: return "StrictlyDecreasing";
    case ShapeKind::UnimodalMin: return "UnimodalMin";
    case ShapeKind::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

StabilityVerdict verdict(const NormalizedModel& m) {
  StabilityVerdict out;
  auto& list = out.checklist;
  auto add = [&list](std::string group, std::string name, std::string anchor, bool holds,
                     std::vector<std::pair<std::string, double>> values) {
    list.push_back(Condition{std::move(group), std::move(name), std::move(anchor), holds,
                             std::move(values)});
    return holds;
  };

  const double a1 = m.a1();
  const double a2 = m.a2();
  const double x_max = m.controls().x_max;
  const double w = m.w();
  const double tl = m.theta_l();
  const double tr = m.theta_r();
  const double e = m.excess();

  // Common preconditions, cheapest first.
  const bool exists = add("common", "fixed point exists", "A1 < A2 + x_max",
                          strictly_less(a1, a2 + x_max),
                          {{"A1", a1}, {"A2 + x_max", a2 + x_max}});
  if (exists) {
    if (auto fp = fixed_point(m)) out.x_star = fp->x_star;
  }
  out.shape = classify_shape(m);
  const ShapeClass& shape = out.shape;
  const CoreInvariance inv = core_invariance(m, shape);
  const bool invariant = add("common", "core invariant", "f((theta_l,theta_r)) in (theta_l,theta_r)",
                             inv.invariant,
                             {{"image_inf", inv.image_inf},
                              {"image_sup", inv.image_sup},
                              {"theta_l", tl},
                              {"theta_r", tr}});
  const bool no_endpoint_cycle =
      add("common", "endpoints not a 2-cycle", "theta_l + theta_r != 1",
          endpoints_not_2cycle(m), {{"theta_l + theta_r", tl + tr}});
  std::vector<std::pair<std::string, double>> shape_values{
      {"f'(theta_l+)", shape.evidence.slope_left},
      {"f'(theta_r-)", shape.evidence.slope_right},
      {"sign_changes", static_cast<double>(shape.evidence.sign_changes)}};
  if (shape.x_c) shape_values.emplace_back("x_c", *shape.x_c);
  add("common", "shape " + to_string(shape.kind), "monotone or single minimum on the core",
      shape.kind != ShapeKind::Unclassified, std::move(shape_values));

  const bool common = exists && invariant && no_endpoint_cycle && out.x_star.has_value();
  auto certify = [&out](Certificate c) {
    if (out.certified_by == Certificate::None) out.certified_by = c;
  };

  const double inv_bound = invariance_w_bound(m);

  if (shape.kind == ShapeKind::StrictlyIncreasing) {
    // Increasing core: existence is the only extra condition.
    if (common) certify(Certificate::MonotoneIncreasing);
    add(to_string(Certificate::MonotoneIncreasing), "strictly increasing core",
        "f' > 0 on the core", true, {{"f'(theta_l+)", shape.evidence.slope_left}});
  }

  if (shape.kind == ShapeKind::StrictlyDecreasing) {
    const double bound = decreasing_core_w_bound(m);
    const double min_slope = min_core_slope(m, tr);
    {
      const std::string g = to_string(Certificate::MonotoneDecreasing);
      const bool slope_ok = add(g, "slope above -1", "f'(x) > -1 on the core",
                                strictly_less(-1.0, min_slope), {{"min f'", min_slope}});
      const bool w_ok = add(g, "w bound",
                            "w <= min{(theta_r-theta_l)/(1-theta_l), "
                            "(theta_r-theta_l)/(theta_r-(A1-A2)+)}",
                            w <= bound, {{"w", w}, {"bound", bound}});
      if (common && slope_ok && w_ok) certify(Certificate::MonotoneDecreasing);
    }
    {
      const std::string g = to_string(Certificate::ConvexDecreasing);
      const bool convex = add(g, "convex core", "3J - 2h > 0 on the core",
                              shape.evidence.convex, {});
      const bool slope_ok = add(g, "left slope", "f'(theta_l+) >= -1",
                                shape.evidence.slope_left >= -1.0,
                                {{"f'(theta_l+)", shape.evidence.slope_left}});
      const bool w_ok = add(g, "w bound",
                            "w <= min{(theta_r-theta_l)/(1-theta_l), "
                            "(theta_r-theta_l)/(theta_r-(A1-A2)+)}",
                            w <= bound, {{"w", w}, {"bound", bound}});
      if (common && convex && slope_ok && w_ok) certify(Certificate::ConvexDecreasing);
    }
  }

  if (shape.kind == ShapeKind::UnimodalMin && out.x_star) {
    const double x_star = *out.x_star;
    const double x_c = *shape.x_c;
    {
      const std::string g = to_string(Certificate::UnimodalMinLeft);
      const bool w_ok = add(g, "w bound", "w <= (theta_r-theta_l)/(1-theta_l)",
                            w <= inv_bound, {{"w", w}, {"bound", inv_bound}});
      const bool left = add(g, "minimum left of x*", "x_c <= x*", x_c <= x_star,
                            {{"x_c", x_c}, {"x*", x_star}});
      const bool a_ok = add(g, "existence (closed)", "A1 <= A2 + x_max", a1 <= a2 + x_max,
                            {{"A1", a1}, {"A2 + x_max", a2 + x_max}});
      if (common && w_ok && left && a_ok) certify(Certificate::UnimodalMinLeft);
    }
    const bool right = strictly_less(x_star, x_c);
    const double min_slope = right ? min_core_slope(m, x_c) : shape.evidence.slope_left;
    {
      const std::string g = to_string(Certificate::UnimodalMinRight);
      const bool right_ok = add(g, "minimum right of x*", "x_c > x*", right,
                                {{"x_c", x_c}, {"x*", x_star}});
      const bool slope_ok = add(g, "slope above -1 left of x_c",
                                "f'(x) > -1 for theta_l < x < x_c",
                                strictly_less(-1.0, min_slope), {{"min f'", min_slope}});
      const double bound_a = unimodal_right_w_bound(m, x_star);
      const bool part_a = strictly_less(e, x_star) && w <= bound_a;
      add(g, "variant (a)",
          "x* > (A1-A2)+ and w <= min{(theta_r-theta_l)/(1-theta_l), "
          "(x*-theta_l)/(x*-(A1-A2)+)}",
          part_a, {{"(A1-A2)+", e}, {"w", w}, {"bound", bound_a}});
      const bool part_b = x_star <= e && e < x_max && w <= inv_bound;
      add(g, "variant (b)",
          "x* <= (A1-A2)+ < x_max and w <= (theta_r-theta_l)/(1-theta_l)", part_b,
          {{"(A1-A2)+", e}, {"w", w}, {"bound", inv_bound}});
      if (common && right_ok && slope_ok && (part_a || part_b)) {
        certify(Certificate::UnimodalMinRight);
      }
    }
    {
      const std::string g = to_string(Certificate::ConvexUnimodalRight);
      const bool convex = add(g, "convex core", "3J - 2h > 0 on the core",
                              shape.evidence.convex, {});
      const bool right_ok = add(g, "minimum right of x*", "x_c > x*", right,
                                {{"x_c", x_c}, {"x*", x_star}});
      const bool excess_ok = add(g, "x* above (A1-A2)+", "(A1-A2)+ < x*",
                                 strictly_less(e, x_star), {{"(A1-A2)+", e}, {"x*", x_star}});
      const bool slope_ok = add(g, "left slope", "f'(theta_l+) >= -1",
                                shape.evidence.slope_left >= -1.0,
                                {{"f'(theta_l+)", shape.evidence.slope_left}});
      const double bound = convex_unimodal_right_w_bound(m, x_star);
      const bool w_ok = add(g, "w bound",
                            "w <= min{(theta_r-theta_l)/(1-theta_l), "
                            "(x*-theta_l+(theta_l-(A1-A2)+)+/m)/(x*-(A1-A2)+)}",
                            w <= bound,
                            {{"w", w}, {"bound", bound}, {"m", contraction_ratio(m, x_star)}});
      if (common && convex && right_ok && excess_ok && slope_ok && w_ok) {
        certify(Certificate::ConvexUnimodalRight);
      }
    }
  }
  return out;
}

std::string format_report(const NormalizedModel& m, const StabilityVerdict& v) {
  std::ostringstream os;
  os.precision(10);
  os << "A1 = " << m.a1() << ", A2 = " << m.a2() << ", w = " << m.w() << '\n';
  os << "core = (" << m.theta_l() << ", " << m.theta_r() << ")\n";
  if (v.x_star) {
    os << "x* = " << *v.x_star << '\n';
  } else {
    os << "x* = none\n";
  }
  os << "shape = " << to_string(v.shape.kind);
  if (v.shape.x_c) os << " (x_c = " << *v.shape.x_c << ")";
  os << '\n';
  std::string group;
  for (const Condition& c : v.checklist) {
    if (c.group != group) {
      group = c.group;
      os << "[" << group << "]\n";
    }
    os << "  " << (c.holds ? "PASS" : "FAIL") << "  " << c.name << ": " << c.anchor;
    if (!c.values.empty()) {
      os << "  {";
      for (std::size_t i = 0; i < c.values.size(); ++i) {
        if (i) os << ", ";
        os << c.values[i].first << " = " << c.values[i].second;
      }
      os << "}";
    }
    os << '\n';
  }
  os << "certified_by = " << to_string(v.certified_by) << '\n';
  return os.str();
}

std::string verdict_json(const NormalizedModel& m, const StabilityVerdict& v) {
  nlohmann::ordered_json j;
  j["certified_by"] = to_string(v.certified_by);
  j["A1"] = m.a1();
  j["A2"] = m.a2();
  j["w"] = m.w();
  j["theta_l"] = m.theta_l();
  j["theta_r"] = m.theta_r();
  j["x_star"] = v.x_star ? nlohmann::ordered_json(*v.x_star) : nlohmann::ordered_json(nullptr);
  j["shape"] = to_string(v.shape.kind);
  j["x_c"] = v.shape.x_c ? nlohmann::ordered_json(*v.shape.x_c) : nlohmann::ordered_json(nullptr);
  auto& conditions = j["checklist"] = nlohmann::ordered_json::array();
  for (const Condition& c : v.checklist) {
    nlohmann::ordered_json entry;
    entry["group"] = c.group;
    entry["name"] = c.name;
    entry["anchor"] = c.anchor;
    entry["holds"] = c.holds;
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    for (const auto& [key, value] : c.values) {
      values[key] = std::isfinite(value) ? nlohmann::ordered_json(value)
                                         : nlohmann::ordered_json(std::to_string(value));
    }
    entry["values"] = std::move(values);
    conditions.push_back(std::move(entry));
  }
  return j.dump(2);
}

}  // namespace gred
