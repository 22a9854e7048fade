#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ptwell {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr cplx iu{0.0, 1.0};

// Named failure modes, thrown with a short diagnostic string.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define PTWELL_DEFINE_ERROR(Name) \
  struct Name : NumericalError {  \
    using NumericalError::NumericalError; \
  }

PTWELL_DEFINE_ERROR(StabilizationFailure);
PTWELL_DEFINE_ERROR(NoConvergence);
PTWELL_DEFINE_ERROR(InitializationTooShallow);
PTWELL_DEFINE_ERROR(OverflowRegime);
PTWELL_DEFINE_ERROR(BoundaryZero);
PTWELL_DEFINE_ERROR(CountMismatch);
PTWELL_DEFINE_ERROR(ContourThroughZero);
PTWELL_DEFINE_ERROR(BranchTrackingFailure);
PTWELL_DEFINE_ERROR(ContinuationBreak);
PTWELL_DEFINE_ERROR(NotBracketed);
PTWELL_DEFINE_ERROR(NoImaginaryNode);
PTWELL_DEFINE_ERROR(FitDegenerate);
PTWELL_DEFINE_ERROR(PoleOnEvaluation);
PTWELL_DEFINE_ERROR(NearTurningPoint);
PTWELL_DEFINE_ERROR(TracerStall);
PTWELL_DEFINE_ERROR(ConnectionAmbiguous);
PTWELL_DEFINE_ERROR(NoTransition);

#undef PTWELL_DEFINE_ERROR

// Sector C0 = {h != 0, |arg h| < pi/4} where the semiclassical family lives.
inline bool in_sector_c0(cplx h) {
  return h != cplx(0.0) && std::abs(std::arg(h)) < pi / 4.0;
}

// Sector for the scaled representation: |arg a| < 4pi/5, plus the continued
// negative real axis.
inline bool in_sector_alpha(cplx a) {
  if (a == cplx(0.0)) return true;  // K(0) is the large-parameter limit point
  return std::abs(std::arg(a)) < 4.0 * pi / 5.0 ||
         (std::imag(a) == 0.0 && std::real(a) < 0.0);
}

inline double sqr(double x) { return x * x; }

// ---------------------------------------------------------------------------
// Worker pool. PTWELL_THREADS caps the number of workers.

inline unsigned worker_count() {
  if (const char* env = std::getenv("PTWELL_THREADS")) {
    long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(std::min<long>(n, 64));
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? std::min(hw, 8u) : 1u;
}

// Runs body(i) for i in [0, count). Work items must write into disjoint,
// preallocated slots so the merged result does not depend on scheduling.
template <typename F>
void parallel_for(std::size_t count, F&& body) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex guard;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        if (failed.load()) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(guard);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Scalar root finding.

template <typename F>
double bisect_root(F&& f, double a, double b, double xtol, int maxit = 200) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw NotBracketed("bisect_root: endpoints have the same sign");
  for (int i = 0; i < maxit && std::abs(b - a) > xtol; ++i) {
    double m = 0.5 * (a + b), fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return 0.5 * (a + b);
}

// Bisection on a boolean predicate: pred(a) == true, pred(b) == false.
template <typename P>
double bisect_predicate(P&& pred, double a, double b, double xtol,
                        int maxit = 200) {
  if (!pred(a) || pred(b))
    throw NotBracketed("bisect_predicate: predicate does not flip on [a,b]");
  for (int i = 0; i < maxit && std::abs(b - a) > xtol; ++i) {
    double m = 0.5 * (a + b);
    (pred(m) ? a : b) = m;
  }
  return 0.5 * (a + b);
}

// Secant iteration with bisection fallback once a sign change is seen.
template <typename F>
double secant_root(F&& f, double x0, double x1, double xtol, double ftol,
                   int maxit = 80) {
  double f0 = f(x0), f1 = f(x1);
  bool have_bracket = (f0 > 0) != (f1 > 0);
  double lo = std::min(x0, x1), hi = std::max(x0, x1);
  double flo = x0 < x1 ? f0 : f1, fhi = x0 < x1 ? f1 : f0;
  for (int i = 0; i < maxit; ++i) {
    if (std::abs(f1) < ftol || std::abs(x1 - x0) < xtol) return x1;
    double denom = f1 - f0;
    double x2;
    if (denom == 0.0) {
      if (!have_bracket) throw NoConvergence("secant_root: flat residual");
      x2 = 0.5 * (lo + hi);
    } else {
      x2 = x1 - f1 * (x1 - x0) / denom;
      if (have_bracket && (x2 <= lo || x2 >= hi)) x2 = 0.5 * (lo + hi);
    }
    double f2 = f(x2);
    if (have_bracket) {
      if ((f2 > 0) == (flo > 0)) {
        lo = x2;
        flo = f2;
      } else {
        hi = x2;
        fhi = f2;
      }
    } else if ((f2 > 0) != (f1 > 0)) {
      have_bracket = true;
      lo = std::min(x1, x2);
      hi = std::max(x1, x2);
      flo = x1 < x2 ? f1 : f2;
      fhi = x1 < x2 ? f2 : f1;
    }
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f2;
  }
  (void)fhi;
  return x1;
}

// ---------------------------------------------------------------------------
// Least squares line fit, with the standard error of the slope.

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x,
                        const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw FitDegenerate("fit_line: need >= 2 points");
  double xm = 0, ym = 0;
  for (std::size_t i = 0; i < n; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= n;
  ym /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (sxx == 0.0) throw FitDegenerate("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  if (n > 2) {
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ss += r * r;
    }
    fit.slope_stderr = std::sqrt(ss / double(n - 2) / sxx);
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Text helpers shared by the CLI and the tests.

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Accepts "1.5", "-2.25e-3", "1+2i", "0.03-0.3i", "i", "-i", "2i".
inline cplx parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw std::invalid_argument("empty complex literal");

  auto parse_part = [](const std::string& t) -> double {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("bad numeric literal");
    return v;
  };

  if (s.back() == 'i' || s.back() == 'I' || s.back() == 'j') {
    std::string body = s.substr(0, s.size() - 1);
    // Split at the last +/- that is not part of an exponent.
    for (std::size_t k = body.size(); k-- > 1;) {
      if ((body[k] == '+' || body[k] == '-') &&
          body[k - 1] != 'e' && body[k - 1] != 'E') {
        return {parse_part(body.substr(0, k)), parse_part(body.substr(k))};
      }
    }
    return {0.0, parse_part(body)};
  }
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad complex literal");
  return {v, 0.0};
}

inline std::string format_complex(cplx z) {
  std::string out = format_double(z.real());
  if (z.imag() >= 0 || std::isnan(z.imag())) out += "+";
  out += format_double(z.imag());
  out += "i";
  return out;
}

}  // namespace ptwell
