#include "slv/brownian_path.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "slv/rng.hpp"

namespace slv {

namespace {

constexpr std::uint64_t kForwardStream = 0x464f525741524431ull;   // increments on [0, t_max]
constexpr std::uint64_t kBackwardStream = 0x4241434b57415244ull;  // increments on [t_min, 0]
constexpr std::uint64_t kRefineStream = 0x524546494e450000ull;    // bridge midpoints
constexpr std::int64_t kMaxGridPoints = 1ll << 31;

std::int64_t nearest_index(double t, double step) {
  return static_cast<std::int64_t>(std::llround(t / step));
}

void require_on_grid(double t, double step, std::int64_t k, const char* what) {
  const double snapped = static_cast<double>(k) * step;
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  if (std::abs(snapped - t) > tol) {
    throw std::invalid_argument(std::string(what) + ": time is not on the path grid");
  }
}

}  // namespace

BrownianPath BrownianPath::sample(std::uint64_t seed, double t_min, double t_max, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("BrownianPath: step must be positive");
  if (t_min > 0.0 || t_max < 0.0) {
    throw std::invalid_argument("BrownianPath: window must satisfy t_min <= 0 <= t_max");
  }
  const std::int64_t kmin = nearest_index(t_min, step);
  const std::int64_t kmax = nearest_index(t_max, step);
  require_on_grid(t_min, step, kmin, "BrownianPath::sample");
  require_on_grid(t_max, step, kmax, "BrownianPath::sample");
  if (kmax - kmin + 1 > kMaxGridPoints) {
    throw std::invalid_argument("BrownianPath: grid size overflow");
  }

  auto values = std::make_shared<std::vector<double>>(static_cast<std::size_t>(kmax - kmin + 1));
  const double sqrt_dt = std::sqrt(step);
  auto slot = [&](std::int64_t k) -> double& {
    return (*values)[static_cast<std::size_t>(k - kmin)];
  };

  slot(0) = 0.0;
  for (std::int64_t k = 0; k < kmax; ++k) {
    slot(k + 1) = slot(k) + sqrt_dt * counter_gauss(seed, kForwardStream, zigzag(k));
  }
  for (std::int64_t k = 0; k > kmin; --k) {
    slot(k - 1) = slot(k) + sqrt_dt * counter_gauss(seed, kBackwardStream, zigzag(k - 1));
  }

  BrownianPath path;
  path.base_ = std::move(values);
  path.base_kmin_ = kmin;
  path.base_kmax_ = kmax;
  path.origin_ = 0;
  path.origin_value_ = 0.0;
  path.step_ = step;
  path.seed_ = seed;
  path.generation_ = 0;
  return path;
}

BrownianPath BrownianPath::refine() const {
  const std::int64_t n_old = base_kmax_ - base_kmin_;
  if (2 * (n_old + 1) > kMaxGridPoints) {
    throw std::invalid_argument("BrownianPath::refine: grid size overflow");
  }
  auto values = std::make_shared<std::vector<double>>(static_cast<std::size_t>(2 * n_old + 1));
  const double half = step_ / 2.0;
  const double bridge_sd = std::sqrt(step_ / 4.0);
  const std::uint64_t stream = kRefineStream ^ static_cast<std::uint64_t>(generation_);

  for (std::int64_t i = 0; i <= n_old; ++i) {
    (*values)[static_cast<std::size_t>(2 * i)] = (*base_)[static_cast<std::size_t>(i)];
  }
  for (std::int64_t i = 0; i < n_old; ++i) {
    const double a = (*base_)[static_cast<std::size_t>(i)];
    const double b = (*base_)[static_cast<std::size_t>(i + 1)];
    const std::int64_t interval = base_kmin_ + i;  // absolute, window independent
    (*values)[static_cast<std::size_t>(2 * i + 1)] =
        0.5 * (a + b) + bridge_sd * counter_gauss(seed_, stream, zigzag(interval));
  }

  BrownianPath path;
  path.base_ = std::move(values);
  path.base_kmin_ = 2 * base_kmin_;
  path.base_kmax_ = 2 * base_kmax_;
  path.origin_ = 2 * origin_;
  path.origin_value_ = origin_value_;
  path.step_ = half;
  path.seed_ = seed_;
  path.generation_ = generation_ + 1;
  return path;
}

BrownianPath BrownianPath::shifted(double t) const {
  const std::int64_t j = index_of(t);
  const std::int64_t new_origin = origin_ + j;
  if (new_origin < base_kmin_ || new_origin > base_kmax_) {
    throw std::invalid_argument("BrownianPath::shifted: shift target outside sampled domain");
  }
  BrownianPath path = *this;
  path.origin_ = new_origin;
  path.origin_value_ = (*base_)[static_cast<std::size_t>(new_origin - base_kmin_)];
  return path;
}

double BrownianPath::value_at(std::int64_t k) const {
  const std::int64_t slot = k + origin_;
  if (slot < base_kmin_ || slot > base_kmax_) {
    throw std::out_of_range("BrownianPath::value_at: index outside sampled domain");
  }
  return (*base_)[static_cast<std::size_t>(slot - base_kmin_)] - origin_value_;
}

double BrownianPath::value(double t) const { return value_at(index_of(t)); }

double BrownianPath::increment_at(std::int64_t k) const {
  return value_at(k + 1) - value_at(k);
}

std::int64_t BrownianPath::index_of(double t) const {
  const std::int64_t k = nearest_index(t, step_);
  require_on_grid(t, step_, k, "BrownianPath");
  return k;
}

bool BrownianPath::covers(double t) const {
  const std::int64_t k = nearest_index(t, step_);
  const double snapped = static_cast<double>(k) * step_;
  if (std::abs(snapped - t) > 1e-9 * std::max(1.0, std::abs(t))) return false;
  return k >= index_min() && k <= index_max();
}

namespace {

struct DumpHeader {
  char magic[8];
  std::uint64_t seed;
  std::int64_t kmin;
  std::int64_t kmax;
  double step;
  std::int32_t generation;
  std::int32_t reserved;
};

constexpr char kMagic[8] = {'S', 'L', 'V', 'P', 'A', 'T', 'H', '1'};

}  // namespace

void BrownianPath::dump(std::ostream& out) const {
  DumpHeader header{};
  std::memcpy(header.magic, kMagic, sizeof(kMagic));
  header.seed = seed_;
  header.kmin = index_min();
  header.kmax = index_max();
  header.step = step_;
  header.generation = generation_;
  header.reserved = 0;
  out.write(reinterpret_cast<const char*>(&header), sizeof(header));
  for (std::int64_t k = index_min(); k <= index_max(); ++k) {
    const double v = value_at(k);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
}

BrownianPath BrownianPath::restore(std::istream& in) {
  DumpHeader header{};
  in.read(reinterpret_cast<char*>(&header), sizeof(header));
  if (!in || std::memcmp(header.magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("BrownianPath::restore: bad header");
  }
  const std::int64_t count = header.kmax - header.kmin + 1;
  auto values = std::make_shared<std::vector<double>>(static_cast<std::size_t>(count));
  in.read(reinterpret_cast<char*>(values->data()),
          static_cast<std::streamsize>(sizeof(double) * values->size()));
  if (!in) throw std::runtime_error("BrownianPath::restore: truncated payload");

  BrownianPath path;
  path.base_ = std::move(values);
  path.base_kmin_ = header.kmin;
  path.base_kmax_ = header.kmax;
  path.origin_ = 0;
  path.origin_value_ = 0.0;
  path.step_ = header.step;
  path.seed_ = header.seed;
  path.generation_ = header.generation;
  return path;
}

}  // namespace slv
