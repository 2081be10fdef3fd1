#include "amr/ama.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <thread>

#include "amr/error.hpp"
#include "amr/format.hpp"
#include "amr/random.hpp"

namespace amr {

std::size_t active_count(std::span<const double> v) noexcept {
  return static_cast<std::size_t>(
      std::count_if(v.begin(), v.end(), [](double e) { return e != 0.0; }));
}

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double e : v)
    if (!std::isfinite(e))
      throw Error(ErrorKind::InvalidArgument, std::string(what) + " has a non-finite entry");
}

// Shared by both directions: share[j] = y / (p · v[j]).
Vector equal_shares(std::span<const double> v, double y, IndexDivisor divisor) {
  if (v.empty()) throw Error(ErrorKind::EmptyVector, "empty vector");
  require_finite(v, "vector");
  const std::size_t p = active_count(v);
  Vector out(v.size(), 0.0);
  if (p == 0) {
    if (y != 0.0)
      throw Error(ErrorKind::DegenerateInstance,
                  "all entries are zero but the target is nonzero");
    return out;
  }
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] == 0.0) continue;
    const double d = divisor == IndexDivisor::TotalCount
                         ? static_cast<double>(p)
                         : static_cast<double>(j + 1);
    out[j] = y / (d * v[j]);
  }
  return out;
}

}  // namespace

Vector solve_row(std::span<const double> a, double y, IndexDivisor divisor) {
  return equal_shares(a, y, divisor);
}

double reconstruct(std::span<const double> a, std::span<const double> x) {
  if (a.size() != x.size())
    throw Error(ErrorKind::LengthMismatch, "coefficient and solution lengths differ");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * x[j];
  return s;
}

AmaDecomposition fit_instance(std::span<const double> x, double y) {
  AmaDecomposition d;
  d.a = equal_shares(x, y, IndexDivisor::TotalCount);
  d.x.assign(x.begin(), x.end());
  d.y = y;
  d.y_hat = reconstruct(d.a, d.x);
  d.p = active_count(x);
  return d;
}

double percentage_error(double y, double y_hat) noexcept {
  if (y == 0.0) return y_hat == 0.0 ? 0.0 : INFINITY;
  return std::abs((y_hat - y) / y) * 100.0;
}

namespace {

ValidationRecord run_checkpoint(std::size_t i, std::uint64_t seed,
                                const ValidationOptions& opts) {
  Rng rng(split_seed(seed, static_cast<std::uint64_t>(i)));
  const auto t_s = std::chrono::steady_clock::now();

  Vector a(i);
  for (auto& v : a) v = rng.uniform(opts.lo, opts.hi);
  double y = rng.uniform(opts.lo, opts.hi);
  while (std::abs(y) < opts.min_abs_y) y = rng.uniform(opts.lo, opts.hi);

  const Vector x = solve_row(a, y, opts.divisor);
  const double y_hat = reconstruct(a, x);

  const auto t_e = std::chrono::steady_clock::now();
  ValidationRecord r;
  r.i = i;
  r.y = y;
  r.y_hat = y_hat;
  r.t = std::chrono::duration<double>(t_e - t_s).count();
  r.eps = percentage_error(y, y_hat);
  return r;
}

}  // namespace

std::vector<ValidationRecord> ama_validate(std::span<const std::size_t> checkpoints,
                                           std::uint64_t seed,
                                           const ValidationOptions& opts) {
  if (checkpoints.empty())
    throw Error(ErrorKind::InvalidArgument, "no checkpoint dimensions given");
  if (!(opts.lo < opts.hi) || std::max(std::abs(opts.lo), std::abs(opts.hi)) < opts.min_abs_y)
    throw Error(ErrorKind::InvalidArgument, "value range cannot produce a usable target");
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (checkpoints[k] == 0)
      throw Error(ErrorKind::InvalidArgument, "checkpoint dimensions must be positive");
    if (k > 0 && checkpoints[k] <= checkpoints[k - 1])
      throw Error(ErrorKind::InvalidArgument, "checkpoint dimensions must be ascending");
  }

  const auto seed_v = split_seed(seed, "ama-validate");
  std::vector<ValidationRecord> out(checkpoints.size());
  const unsigned threads =
      std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(checkpoints.size())));
  if (threads == 1) {
    for (std::size_t k = 0; k < checkpoints.size(); ++k)
      out[k] = run_checkpoint(checkpoints[k], seed_v, opts);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < checkpoints.size(); k += threads)
          out[k] = run_checkpoint(checkpoints[k], seed_v, opts);
      });
  }
  return out;
}

void write_validation_csv(std::ostream& out,
                          std::span<const ValidationRecord> records) {
  out << "i,y,y_hat,t_seconds,eps_percent\n";
  for (const auto& r : records)
    out << r.i << ',' << fmt_double(r.y) << ',' << fmt_double(r.y_hat) << ','
        << fmt_double(r.t) << ',' << fmt_double(r.eps) << '\n';
}

}  // namespace amr
