#include "mri/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace mri::svg {

namespace {

constexpr double W = 720, Hgt = 440;
constexpr double L = 80, R = 170, T = 40, B = 60;  // plot margins, legend on the right

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string f(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

struct Scale {
  double lo = 0, hi = 1;
  bool log = false;
  double a0 = 0, a1 = 1;  // pixel range

  [[nodiscard]] double map(double v) const {
    const double u = log ? std::log10(v) : v;
    return a0 + (u - lo) / (hi - lo) * (a1 - a0);
  }
};

Scale fit(double lo, double hi, bool log, double a0, double a1) {
  Scale s;
  s.log = log;
  s.a0 = a0;
  s.a1 = a1;
  if (!(lo <= hi)) lo = hi = log ? 1.0 : 0.0;
  if (log) {
    lo = std::floor(std::log10(lo));
    hi = std::ceil(std::log10(hi));
    if (hi <= lo) hi = lo + 1;
  } else {
    if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  s.lo = lo;
  s.hi = hi;
  return s;
}

std::vector<double> ticks(const Scale& s) {
  std::vector<double> t;
  if (s.log) {
    const int step = std::max(1, static_cast<int>((s.hi - s.lo) / 8) + 1);
    for (int e = static_cast<int>(s.lo); e <= static_cast<int>(s.hi); e += step) t.push_back(std::pow(10.0, e));
    return t;
  }
  const double span = s.hi - s.lo;
  const double raw = span / 6;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double d = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      d = m * mag;
      break;
    }
  }
  for (double v = std::ceil(s.lo / d) * d; v <= s.hi + 1e-12 * span; v += d) t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  return t;
}

void frame(std::ostringstream& o, const Axes& ax) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hgt << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << f((L + W - R) / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(ax.title) << "</text>\n";
  o << "<text x=\"" << f((L + W - R) / 2) << "\" y=\"" << f(Hgt - 15) << "\" text-anchor=\"middle\">" << esc(ax.xlabel) << "</text>\n";
  o << "<text transform=\"translate(18," << f((T + Hgt - B) / 2) << ") rotate(-90)\" text-anchor=\"middle\">" << esc(ax.ylabel) << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << Hgt - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
}

void yaxis(std::ostringstream& o, const Scale& ys) {
  for (double v : ticks(ys)) {
    const double y = ys.map(v);
    o << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << f(y) << "\" y2=\"" << f(y) << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << f(y + 4) << "\" text-anchor=\"end\">" << f(v) << "</text>\n";
  }
}

void legend(std::ostringstream& o, const std::vector<std::string>& labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double y = T + 10 + 18.0 * static_cast<double>(i);
    o << "<rect x=\"" << W - R + 12 << "\" y=\"" << f(y - 9) << "\" width=\"12\" height=\"10\" fill=\"" << kColors[i % 8] << "\"/>\n";
    o << "<text x=\"" << W - R + 30 << "\" y=\"" << f(y) << "\">" << esc(labels[i]) << "</text>\n";
  }
}

}  // namespace

std::string line_plot(const Axes& ax, const std::vector<Series>& series) {
  const double inf = std::numeric_limits<double>::infinity();
  double xlo = inf, xhi = -inf, ylo = inf, yhi = -inf;
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!ax.logx || x > 0) && (!ax.logy || y > 0);
  };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  }
  const Scale xs = fit(xlo, xhi, ax.logx, L, W - R);
  const Scale ys = fit(ylo, yhi, ax.logy, Hgt - B, T);
  std::ostringstream o;
  frame(o, ax);
  yaxis(o, ys);
  for (double v : ticks(xs)) {
    o << "<text x=\"" << f(xs.map(v)) << "\" y=\"" << f(Hgt - B + 16) << "\" text-anchor=\"middle\">" << f(v) << "</text>\n";
  }
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    labels.push_back(s.label);
    o << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << kColors[k % 8] << "\" points=\"";
    bool first = true;
    double prev_y = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      const double px = xs.map(s.x[i]);
      const double py = ys.map(s.y[i]);
      if (s.step && !first) o << f(px) << ',' << f(prev_y) << ' ';
      o << f(px) << ',' << f(py) << ' ';
      first = false;
      prev_y = py;
    }
    o << "\"/>\n";
  }
  legend(o, labels);
  o << "</svg>\n";
  return o.str();
}

std::string bar_chart(const Axes& ax, const std::vector<std::string>& categories,
                      const std::vector<std::string>& groups, const std::vector<std::vector<double>>& values) {
  double lo = 0, hi = 0;
  for (const auto& row : values) {
    for (double v : row) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const Scale ys = fit(lo, hi, false, Hgt - B, T);
  std::ostringstream o;
  frame(o, ax);
  yaxis(o, ys);
  const double zero = ys.map(0.0);
  o << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << f(zero) << "\" y2=\"" << f(zero) << "\" stroke=\"black\"/>\n";
  const double nc = static_cast<double>(std::max<std::size_t>(1, categories.size()));
  const double slot = (W - L - R) / nc;
  const double ng = static_cast<double>(std::max<std::size_t>(1, groups.size()));
  const double bw = 0.8 * slot / ng;
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double x0 = L + slot * static_cast<double>(c) + 0.1 * slot;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double v = c < values[g].size() ? values[g][c] : std::nan("");
      if (!std::isfinite(v)) continue;
      const double y = ys.map(v);
      o << "<rect x=\"" << f(x0 + bw * static_cast<double>(g)) << "\" y=\"" << f(std::min(y, zero)) << "\" width=\"" << f(bw)
        << "\" height=\"" << f(std::abs(zero - y)) << "\" fill=\"" << kColors[g % 8] << "\"/>\n";
    }
    o << "<text x=\"" << f(x0 + 0.4 * slot) << "\" y=\"" << f(Hgt - B + 16) << "\" text-anchor=\"middle\">" << esc(categories[c]) << "</text>\n";
  }
  legend(o, groups);
  o << "</svg>\n";
  return o.str();
}

}  // namespace mri::svg
