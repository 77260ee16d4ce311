#pragma once
// rates.hpp: nonnegative time-dependent rate functions with discontinuity metadata.
//
// Textual forms accepted by parse() and produced by str():
//   constant:<c>              c
//   exp:<b>,<r>               b * exp(r t)
//   rational[:<c>]            c / (1 + t), c defaults to 1
//   square:<lo>,<hi>,<P>,<d>  pulse of value hi and width d*P centered in each period P
//   piecewise:<t0>,<spec>;<t1>,<spec>;...   spec evaluated at absolute t

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace weinorman {

namespace detail {

// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("rate spec: bad number '" + s + "'");
  }
  if (pos != s.size()) throw std::invalid_argument("rate spec: bad number '" + s + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t from = 0;
  while (true) {
    std::size_t at = s.find(sep, from);
    if (at == std::string::npos) {
      out.push_back(s.substr(from));
      return out;
    }
    out.push_back(s.substr(from, at - from));
    from = at + 1;
  }
}

}  // namespace detail

struct RateFunction;

struct ConstantRate {
  double value = 0.0;
};

struct ExponentialRate {
  double base = 0.0;
  double growth = 0.0;
};

struct RationalRate {
  double scale = 1.0;
};

// High pulse centered in each period: f(t) = high iff frac(t/period) falls in
// [(1-duty)/2, (1+duty)/2), low otherwise. duty 0 is constant low, duty 1 constant high.
struct SquareWaveRate {
  double low = 0.0;
  double high = 1.0;
  double period = 1.0;
  double duty = 0.5;
};

struct PiecewiseRate {
  std::vector<double> starts;        // ascending, starts[0] == 0
  std::vector<RateFunction> pieces;  // piece i active on [starts[i], starts[i+1])
};

struct RateFunction {
  std::variant<ConstantRate, ExponentialRate, RationalRate, SquareWaveRate, PiecewiseRate> fn =
      ConstantRate{};

  static RateFunction constant(double c) {
    if (!(c >= 0) || !std::isfinite(c)) throw std::invalid_argument("constant rate must be finite and >= 0");
    return {ConstantRate{c}};
  }
  static RateFunction exponential(double base, double growth) {
    if (!(base >= 0) || !std::isfinite(base) || !std::isfinite(growth))
      throw std::invalid_argument("exponential rate needs finite base >= 0 and finite growth");
    return {ExponentialRate{base, growth}};
  }
  static RateFunction rational(double scale = 1.0) {
    if (!(scale >= 0) || !std::isfinite(scale)) throw std::invalid_argument("rational rate scale must be finite and >= 0");
    return {RationalRate{scale}};
  }
  static RateFunction square_wave(double low, double high, double period, double duty) {
    if (!(low >= 0) || !(high >= 0)) throw std::invalid_argument("square wave levels must be >= 0");
    if (!(period > 0)) throw std::invalid_argument("square wave period must be > 0");
    if (!(duty >= 0 && duty <= 1)) throw std::invalid_argument("square wave duty must be in [0,1]");
    return {SquareWaveRate{low, high, period, duty}};
  }
  static RateFunction piecewise(std::vector<double> starts, std::vector<RateFunction> pieces) {
    if (starts.empty() || starts.size() != pieces.size())
      throw std::invalid_argument("piecewise rate needs matching, nonempty starts/pieces");
    if (starts.front() != 0.0) throw std::invalid_argument("piecewise rate must start at t = 0");
    if (!std::is_sorted(starts.begin(), starts.end()) ||
        std::adjacent_find(starts.begin(), starts.end()) != starts.end())
      throw std::invalid_argument("piecewise starts must be strictly ascending");
    return {PiecewiseRate{std::move(starts), std::move(pieces)}};
  }

  double operator()(double t) const {
    struct Eval {
      double t;
      double operator()(const ConstantRate& r) const { return r.value; }
      double operator()(const ExponentialRate& r) const { return r.base * std::exp(r.growth * t); }
      double operator()(const RationalRate& r) const { return r.scale / (1.0 + t); }
      double operator()(const SquareWaveRate& r) const {
        double u = t / r.period;
        u -= std::floor(u);
        return (u >= 0.5 * (1.0 - r.duty) && u < 0.5 * (1.0 + r.duty)) ? r.high : r.low;
      }
      double operator()(const PiecewiseRate& r) const {
        auto it = std::upper_bound(r.starts.begin(), r.starts.end(), t);
        std::size_t i = (it == r.starts.begin()) ? 0 : (it - r.starts.begin() - 1);
        return r.pieces[i](t);
      }
    };
    return std::visit(Eval{t}, fn);
  }

  // Appends every discontinuity strictly inside (a, b). Smooth variants contribute nothing.
  void add_breakpoints(double a, double b, std::vector<double>& out) const {
    if (!(b > a)) return;
    if (const auto* sq = std::get_if<SquareWaveRate>(&fn)) {
      if (sq->low == sq->high || sq->duty == 0.0 || sq->duty == 1.0) return;
      double P = sq->period;
      long long k0 = static_cast<long long>(std::floor(a / P)) - 1;
      long long k1 = static_cast<long long>(std::floor(b / P)) + 1;
      for (long long k = k0; k <= k1; ++k) {
        for (double frac : {0.5 * (1.0 - sq->duty), 0.5 * (1.0 + sq->duty)}) {
          double edge = (static_cast<double>(k) + frac) * P;
          if (edge > a && edge < b) out.push_back(edge);
        }
      }
    } else if (const auto* pw = std::get_if<PiecewiseRate>(&fn)) {
      for (std::size_t i = 0; i < pw->starts.size(); ++i) {
        double lo = std::max(a, pw->starts[i]);
        double hi = (i + 1 < pw->starts.size()) ? std::min(b, pw->starts[i + 1]) : b;
        if (pw->starts[i] > a && pw->starts[i] < b) out.push_back(pw->starts[i]);
        if (hi > lo) pw->pieces[i].add_breakpoints(lo, hi, out);
      }
    }
  }

  std::vector<double> breakpoints(double a, double b) const {
    std::vector<double> out;
    add_breakpoints(a, b, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // True only if f vanishes almost everywhere on [a, b]; false negatives are fine
  // (callers use this to skip integration work, never to change results).
  bool is_zero_on(double a, double b) const {
    struct Zero {
      double a, b;
      bool operator()(const ConstantRate& r) const { return r.value == 0.0; }
      bool operator()(const ExponentialRate& r) const { return r.base == 0.0; }
      bool operator()(const RationalRate& r) const { return r.scale == 0.0; }
      bool operator()(const SquareWaveRate& r) const {
        if (r.low == 0.0 && r.high == 0.0) return true;
        if (r.low != 0.0) return false;
        if (r.duty == 0.0) return true;
        // no positive-measure overlap between [a,b] and any high window
        double P = r.period;
        long long k0 = static_cast<long long>(std::floor(a / P)) - 1;
        long long k1 = static_cast<long long>(std::floor(b / P)) + 1;
        for (long long k = k0; k <= k1; ++k) {
          double lo = (static_cast<double>(k) + 0.5 * (1.0 - r.duty)) * P;
          double hi = (static_cast<double>(k) + 0.5 * (1.0 + r.duty)) * P;
          if (std::min(b, hi) > std::max(a, lo)) return false;
        }
        return true;
      }
      bool operator()(const PiecewiseRate& r) const {
        for (std::size_t i = 0; i < r.starts.size(); ++i) {
          double lo = std::max(a, r.starts[i]);
          double hi = (i + 1 < r.starts.size()) ? std::min(b, r.starts[i + 1]) : b;
          if (hi > lo && !r.pieces[i].is_zero_on(lo, hi)) return false;
        }
        return true;
      }
    };
    return std::visit(Zero{a, b}, fn);
  }

  std::string str() const {
    struct Str {
      std::string operator()(const ConstantRate& r) const { return "constant:" + detail::format_double(r.value); }
      std::string operator()(const ExponentialRate& r) const {
        return "exp:" + detail::format_double(r.base) + "," + detail::format_double(r.growth);
      }
      std::string operator()(const RationalRate& r) const {
        return r.scale == 1.0 ? "rational" : "rational:" + detail::format_double(r.scale);
      }
      std::string operator()(const SquareWaveRate& r) const {
        return "square:" + detail::format_double(r.low) + "," + detail::format_double(r.high) + "," +
               detail::format_double(r.period) + "," + detail::format_double(r.duty);
      }
      std::string operator()(const PiecewiseRate& r) const {
        std::string s = "piecewise:";
        for (std::size_t i = 0; i < r.starts.size(); ++i) {
          if (i) s += ';';
          s += detail::format_double(r.starts[i]) + "," + r.pieces[i].str();
        }
        return s;
      }
    };
    return std::visit(Str{}, fn);
  }

  static RateFunction parse(const std::string& spec) {
    std::size_t colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    std::string tail = (colon == std::string::npos) ? std::string{} : spec.substr(colon + 1);
    auto args = [&](std::size_t want) {
      auto parts = detail::split(tail, ',');
      if (tail.empty() || parts.size() != want)
        throw std::invalid_argument("rate spec '" + spec + "': expected " + std::to_string(want) + " arguments");
      std::vector<double> vals;
      for (auto& p : parts) vals.push_back(detail::parse_double(p));
      return vals;
    };
    if (head == "constant") return constant(args(1)[0]);
    if (head == "exp") {
      auto v = args(2);
      return exponential(v[0], v[1]);
    }
    if (head == "rational") {
      if (colon == std::string::npos) return rational();
      return rational(args(1)[0]);
    }
    if (head == "square") {
      auto v = args(4);
      return square_wave(v[0], v[1], v[2], v[3]);
    }
    if (head == "piecewise") {
      if (tail.empty()) throw std::invalid_argument("piecewise rate spec is empty");
      std::vector<double> starts;
      std::vector<RateFunction> pieces;
      for (const auto& seg : detail::split(tail, ';')) {
        std::size_t comma = seg.find(',');
        if (comma == std::string::npos)
          throw std::invalid_argument("piecewise segment '" + seg + "': expected <start>,<spec>");
        starts.push_back(detail::parse_double(seg.substr(0, comma)));
        pieces.push_back(parse(seg.substr(comma + 1)));
      }
      return piecewise(std::move(starts), std::move(pieces));
    }
    throw std::invalid_argument("unknown rate function '" + spec + "'");
  }
};

}  // namespace weinorman
