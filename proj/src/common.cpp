#include "scos/errors.hpp"
#include "scos/rng.hpp"

#include <cmath>

namespace scos {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnreachable: return "UNREACHABLE";
    case ErrorCode::kNoInterior: return "NO_INTERIOR";
    case ErrorCode::kGenerationFailed: return "GENERATION_FAILED";
    case ErrorCode::kOutOfRange: return "OUT_OF_RANGE";
    case ErrorCode::kDomain: return "DOMAIN";
    case ErrorCode::kNumerical: return "NUMERICAL";
    case ErrorCode::kNotAmbiguous: return "NOT_AMBIGUOUS";
    case ErrorCode::kNoCandidates: return "NO_CANDIDATES";
    case ErrorCode::kNonconverged: return "NONCONVERGED";
    case ErrorCode::kStepCapExceeded: return "STEP_CAP_EXCEEDED";
    case ErrorCode::kDiverges: return "DIVERGES";
    case ErrorCode::kEmptySet: return "EMPTY_SET";
    case ErrorCode::kConfig: return "CONFIG";
    case ErrorCode::kInvariant: return "INVARIANT";
  }
  return "UNKNOWN";
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (auto p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

// Own transforms instead of std distributions: libstdc++ and libc++ disagree on
// std::normal_distribution output, and traces must be reproducible.
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
  // Box-Muller; discards the second variate to stay stateless.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace scos

namespace scos {

// Marsaglia-Tsang, with the usual boost for shape < 1.
double gamma_variate(double shape, Rng& rng) {
  if (shape < 1.0) {
    double u = uniform01(rng);
    while (u <= 0.0) u = uniform01(rng);
    return gamma_variate(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = standard_normal(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform01(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double beta_variate(double a, double b, Rng& rng) {
  double x = gamma_variate(a, rng);
  double y = gamma_variate(b, rng);
  return x / (x + y);
}

}  // namespace scos
