#include "nullctl/model.hpp"

#include "nullctl/errors.hpp"
#include "nullctl/fluid.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace nullctl {

namespace mp = boost::multiprecision;

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_args(std::string_view text, std::string_view name) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
      close + 1 != text.size()) {
    throw SpecError("malformed interarrival law '" + std::string(text) + "', expected " +
                    std::string(name) + "(...)");
  }
  std::vector<std::string> args;
  std::string_view inner = text.substr(open + 1, close - open - 1);
  while (true) {
    const auto comma = inner.find(',');
    args.push_back(trim(inner.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    inner.remove_prefix(comma + 1);
  }
  return args;
}

std::int64_t checked_int64(const mp::cpp_int& v, const char* what) {
  static const mp::cpp_int limit = mp::cpp_int(1) << 62;
  if (v > limit || v < -limit) {
    throw OverflowError(std::string(what) + " does not fit a 64-bit head-count");
  }
  return v.convert_to<std::int64_t>();
}

}  // namespace

InterarrivalLaw InterarrivalLaw::parse(std::string_view text) {
  const std::string s = trim(text);
  if (s == "exponential") return exponential();
  if (s == "deterministic") return deterministic();
  if (s.rfind("erlang", 0) == 0) {
    const auto args = split_args(s, "erlang");
    if (args.size() != 1) throw SpecError("erlang(k) takes one argument");
    const Rational k = parse_decimal(args[0]);
    if (mp::denominator(k) != 1 || k < 1 || k > 100000) {
      throw SpecError("erlang shape must be a positive integer: '" + s + "'");
    }
    return erlang(mp::numerator(k).convert_to<int>());
  }
  if (s.rfind("uniform", 0) == 0) {
    const auto args = split_args(s, "uniform");
    if (args.size() != 2) throw SpecError("uniform(a,b) takes two arguments");
    return uniform(to_double(parse_decimal(args[0])), to_double(parse_decimal(args[1])));
  }
  throw SpecError("unknown interarrival law '" + s + "'");
}

double InterarrivalLaw::scv() const {
  switch (kind) {
    case Kind::Exponential: return 1.0;
    case Kind::Deterministic: return 0.0;
    case Kind::Erlang: return 1.0 / erlang_k;
    case Kind::Uniform: {
      const double width = upper - lower;
      const double sum = upper + lower;
      return width * width / (3.0 * sum * sum);
    }
  }
  return 0.0;
}

std::string InterarrivalLaw::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Exponential: os << "exponential"; break;
    case Kind::Deterministic: os << "deterministic"; break;
    case Kind::Erlang: os << "erlang(" << erlang_k << ")"; break;
    case Kind::Uniform: os << "uniform(" << lower << "," << upper << ")"; break;
  }
  return os.str();
}

NetworkSpec NetworkSpec::make(std::vector<Rational> lambda, Matrix<Rational> mu, std::vector<Rational> nu) {
  NetworkSpec s;
  s.class_count = lambda.size();
  s.station_count = nu.size();
  s.lambda = std::move(lambda);
  s.lambda_hat.assign(s.class_count, 0.0);
  s.mu = std::move(mu);
  s.mu_hat = Matrix<double>(s.mu.rows(), s.mu.cols(), 0.0);
  s.nu = std::move(nu);
  s.interarrival_law.assign(s.class_count, InterarrivalLaw::exponential());
  s.scv.assign(s.class_count, 1.0);
  s.x0_hat.assign(s.class_count, 0.0);
  return s;
}

std::vector<std::string> validate_spec(const NetworkSpec& spec) {
  std::vector<std::string> issues;
  const std::size_t I = spec.class_count;
  const std::size_t J = spec.station_count;
  auto issue = [&](std::string s) { issues.push_back(std::move(s)); };

  if (I == 0) issue("class_count must be positive");
  if (J == 0) issue("station_count must be positive");
  if (spec.lambda.size() != I) issue("lambda must have one entry per class");
  if (spec.lambda_hat.size() != I) issue("lambda_hat must have one entry per class");
  if (spec.nu.size() != J) issue("nu must have one entry per station");
  if (spec.scv.size() != I) issue("scv must have one entry per class");
  if (spec.interarrival_law.size() != I) issue("interarrival_law must have one entry per class");
  if (spec.x0_hat.size() != I) issue("x0_hat must have one entry per class");
  if (spec.mu.rows() != I || spec.mu.cols() != J) issue("mu must be class_count x station_count");
  if (spec.mu_hat.rows() != I || spec.mu_hat.cols() != J) issue("mu_hat must be class_count x station_count");
  if (!issues.empty()) return issues;

  for (std::size_t i = 0; i < I; ++i) {
    const auto tag = "class " + std::to_string(i + 1);
    if (spec.lambda[i] <= 0) issue(tag + ": lambda must be > 0");
    if (!std::isfinite(spec.lambda_hat[i])) issue(tag + ": lambda_hat must be finite");
    if (!std::isfinite(spec.x0_hat[i])) issue(tag + ": x0_hat must be finite");
    if (!(spec.scv[i] >= 0.0)) issue(tag + ": scv must be >= 0");
    const auto& law = spec.interarrival_law[i];
    if (law.kind == InterarrivalLaw::Kind::Erlang && law.erlang_k < 1) issue(tag + ": erlang shape must be >= 1");
    if (law.kind == InterarrivalLaw::Kind::Uniform && !(law.lower >= 0.0 && law.upper > law.lower)) {
      issue(tag + ": uniform(a,b) needs 0 <= a < b");
    } else if (std::abs(law.scv() - spec.scv[i]) > 1e-12) {
      issue(tag + ": scv does not match interarrival law " + law.describe());
    }
    bool served = false;
    for (std::size_t j = 0; j < J; ++j) {
      const auto pair = "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
      if (spec.mu(i, j) < 0) issue("mu" + pair + " must be >= 0");
      if (spec.mu(i, j) > 0) served = true;
      if (!std::isfinite(spec.mu_hat(i, j))) issue("mu_hat" + pair + " must be finite");
      if (spec.mu(i, j) == 0 && spec.mu_hat(i, j) != 0.0) {
        issue("mu_hat" + pair + " is nonzero but " + pair + " is not an activity");
      }
    }
    if (!served) issue(tag + ": no activity, class is unservable");
  }
  for (std::size_t j = 0; j < J; ++j) {
    const auto tag = "station " + std::to_string(j + 1);
    if (spec.nu[j] <= 0) issue(tag + ": nu must be > 0");
    bool used = false;
    for (std::size_t i = 0; i < I; ++i) used = used || spec.mu(i, j) > 0;
    if (!used) issue(tag + ": no activity, station serves no class");
  }
  return issues;
}

void require_valid(const NetworkSpec& spec) {
  const auto issues = validate_spec(spec);
  if (issues.empty()) return;
  std::string msg = "invalid network spec:";
  for (const auto& s : issues) msg += "\n  - " + s;
  throw SpecError(msg);
}

NetworkSpec with_arrival_rates(const NetworkSpec& spec, std::vector<Rational> lambda) {
  if (lambda.size() != spec.class_count) throw SpecError("arrival-rate vector has wrong length");
  NetworkSpec out = spec;
  out.lambda = std::move(lambda);
  return out;
}

ScaledInstance scale_instance(const NetworkSpec& spec, std::span<const Rational> x_star, std::int64_t n) {
  if (n < 1) throw SpecError("scale parameter n must be >= 1");
  if (x_star.size() != spec.class_count) throw SpecError("x_star has wrong length");
  const std::size_t I = spec.class_count;
  const std::size_t J = spec.station_count;

  ScaledInstance inst;
  inst.n = n;
  inst.sqrt_n = std::sqrt(static_cast<double>(n));
  const double inv_sqrt_n = 1.0 / inst.sqrt_n;
  const Rational rn(n);

  inst.lambda_n.resize(I);
  for (std::size_t i = 0; i < I; ++i) {
    inst.lambda_n[i] = to_double(rn * spec.lambda[i]) + inst.sqrt_n * spec.lambda_hat[i];
  }
  inst.mu_n = Matrix<double>(I, J, 0.0);
  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      if (spec.mu(i, j) == 0) continue;
      inst.mu_n(i, j) = to_double(spec.mu(i, j)) + spec.mu_hat(i, j) * inv_sqrt_n;
      if (!(inst.mu_n(i, j) > 0.0)) {
        throw SpecError("mu^n(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                        ") is not positive at n=" + std::to_string(n));
      }
    }
  }
  inst.servers.resize(J);
  inst.servers_hat.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    const Rational target = rn * spec.nu[j];
    const auto count = checked_int64(round_nearest(target), "server count");
    inst.servers[j] = count;
    inst.servers_hat[j] = inst.sqrt_n * to_double(Rational(Rational(count) - target) / rn);
  }
  inst.initial.resize(I);
  for (std::size_t i = 0; i < I; ++i) {
    const double centre = to_double(rn * x_star[i]);
    const double value = centre + inst.sqrt_n * spec.x0_hat[i];
    if (!std::isfinite(value) || std::abs(value) > 4.0e18) {
      throw OverflowError("initial head-count does not fit a 64-bit integer");
    }
    inst.initial[i] = std::max<std::int64_t>(0, std::llround(value));
  }
  return inst;
}

ScaledInstance scale_instance(const NetworkSpec& spec, const FluidSolution& fluid, std::int64_t n) {
  return scale_instance(spec, fluid.x_star, n);
}

}  // namespace nullctl
