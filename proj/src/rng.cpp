#include "srsim/rng.hpp"

#include <cmath>

namespace srsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& x)
{
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

RngStream::RngStream(std::uint64_t seed)
{
  std::uint64_t x = seed;
  for (auto& s : s_) s = splitmix64(x);
}

std::uint64_t RngStream::next_u64()
{
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform01()
{
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_int(std::uint64_t lo, std::uint64_t hi)
{
  const std::uint64_t span = hi - lo + 1; // hi == UINT64_MAX not needed here
  // Rejection sampling on the top bits; unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return lo + v % span;
}

double RngStream::exponential(double mean)
{
  // uniform01() is in [0,1) so the argument of log stays positive.
  return -mean * std::log(1.0 - uniform01());
}

double RngStream::normal()
{
  // Box-Muller, one value per call. Wastes the sibling value but keeps the
  // stream state a pure function of the draw count.
  double u1 = uniform01();
  while (u1 == 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double RngStream::gamma(double shape)
{
  // Marsaglia-Tsang squeeze method; shape < 1 handled by boosting.
  if (shape < 1.0) {
    const double u = uniform01();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::beta(double a, double b)
{
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

RngStream RngRoot::stream(std::string_view concern, std::uint64_t index) const
{
  std::uint64_t x = seed_;
  std::uint64_t h = splitmix64(x);
  x ^= fnv1a64(concern);
  h ^= splitmix64(x);
  x ^= 0x9e3779b97f4a7c15ULL * (index + 1);
  h ^= splitmix64(x);
  return RngStream(h);
}

} // namespace srsim
