#include "infosense/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

namespace infosense {

LinearOperator::LinearOperator(std::size_t in_dim, std::size_t out_dim, Map apply, Map adjoint,
                               std::string name)
    : in_dim_(in_dim), out_dim_(out_dim), apply_(std::move(apply)), adjoint_(std::move(adjoint)),
      name_(std::move(name)) {
  if (in_dim == 0 || out_dim == 0) throw std::invalid_argument("LinearOperator: empty dimension");
  if (!apply_ || !adjoint_) throw std::invalid_argument("LinearOperator: missing map");
}

Eigen::VectorXd LinearOperator::apply(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != in_dim_) {
    throw std::invalid_argument("LinearOperator::apply: expected " + std::to_string(in_dim_) +
                                " values, got " + std::to_string(x.size()));
  }
  return apply_(x);
}

Eigen::VectorXd LinearOperator::adjoint(const Eigen::VectorXd& y) const {
  if (static_cast<std::size_t>(y.size()) != out_dim_) {
    throw std::invalid_argument("LinearOperator::adjoint: expected " + std::to_string(out_dim_) +
                                " values, got " + std::to_string(y.size()));
  }
  return adjoint_(y);
}

LinearOperator compose(const LinearOperator& outer, const LinearOperator& inner) {
  if (outer.in_dim() != inner.out_dim()) throw std::invalid_argument("compose: dimension mismatch");
  return {inner.in_dim(), outer.out_dim(),
          [outer, inner](const Eigen::VectorXd& x) { return outer.apply(inner.apply(x)); },
          [outer, inner](const Eigen::VectorXd& y) { return inner.adjoint(outer.adjoint(y)); },
          outer.name() + "*" + inner.name()};
}

LinearOperator vstack(const std::vector<LinearOperator>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("vstack: no blocks");
  const std::size_t in = blocks.front().in_dim();
  std::size_t out = 0;
  for (const auto& b : blocks) {
    if (b.in_dim() != in) throw std::invalid_argument("vstack: input dimensions differ");
    out += b.out_dim();
  }
  auto apply = [blocks, out](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(out);
    Eigen::Index row = 0;
    for (const auto& b : blocks) {
      const auto n = static_cast<Eigen::Index>(b.out_dim());
      y.segment(row, n) = b.apply(x);
      row += n;
    }
    return y;
  };
  auto adjoint = [blocks, in](const Eigen::VectorXd& y) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(in));
    Eigen::Index row = 0;
    for (const auto& b : blocks) {
      const auto n = static_cast<Eigen::Index>(b.out_dim());
      x += b.adjoint(y.segment(row, n));
      row += n;
    }
    return x;
  };
  return {in, out, apply, adjoint, "vstack"};
}

LinearOperator coordinate_selection(std::size_t n, std::vector<std::size_t> indices) {
  for (std::size_t i : indices)
    if (i >= n) throw std::invalid_argument("coordinate_selection: index out of range");
  auto idx = std::make_shared<const std::vector<std::size_t>>(std::move(indices));
  const std::size_t m = idx->size();
  return {n, m,
          [idx](const Eigen::VectorXd& x) {
            Eigen::VectorXd y(static_cast<Eigen::Index>(idx->size()));
            for (std::size_t i = 0; i < idx->size(); ++i) y[i] = x[(*idx)[i]];
            return y;
          },
          [idx, n](const Eigen::VectorXd& y) {
            Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < idx->size(); ++i) x[(*idx)[i]] += y[i];
            return x;
          },
          "select"};
}

Dct2::Dct2(std::size_t n) : n_(n), basis_(n, n) {
  if (n == 0) throw std::invalid_argument("Dct2: size must be >= 1");
  const double dn = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double norm = std::sqrt((k == 0 ? 1.0 : 2.0) / dn);
    for (std::size_t i = 0; i < n; ++i) {
      basis_(k, i) = norm * std::cos(std::numbers::pi / dn * (static_cast<double>(i) + 0.5) *
                                     static_cast<double>(k));
    }
  }
}

Image Dct2::forward(const Image& image) const {
  if (static_cast<std::size_t>(image.rows()) != n_ || static_cast<std::size_t>(image.cols()) != n_) {
    throw std::invalid_argument("Dct2: image is not " + std::to_string(n_) + "x" + std::to_string(n_));
  }
  return basis_ * image * basis_.transpose();
}

Image Dct2::inverse(const Image& coefficients) const {
  if (static_cast<std::size_t>(coefficients.rows()) != n_ ||
      static_cast<std::size_t>(coefficients.cols()) != n_) {
    throw std::invalid_argument("Dct2: coefficients are not " + std::to_string(n_) + "x" +
                                std::to_string(n_));
  }
  return basis_.transpose() * coefficients * basis_;
}

namespace {

std::size_t square_side(const Image& image) {
  if (image.rows() != image.cols()) throw std::invalid_argument("image must be square");
  const auto n = static_cast<std::size_t>(image.rows());
  dyadic_log2(n);
  return n;
}

}  // namespace

Image dct2_forward(const Image& image) { return Dct2(square_side(image)).forward(image); }

Image dct2_inverse(const Image& coefficients) {
  return Dct2(square_side(coefficients)).inverse(coefficients);
}

LinearOperator dct2_operator(std::size_t n) {
  auto dct = std::make_shared<const Dct2>(n);
  return {n * n, n * n,
          [dct, n](const Eigen::VectorXd& x) -> Eigen::VectorXd {
            Image c = dct->forward(unflatten(x, n, n));
            return flatten(c);
          },
          [dct, n](const Eigen::VectorXd& y) -> Eigen::VectorXd {
            Image x = dct->inverse(unflatten(y, n, n));
            return flatten(x);
          },
          "dct2"};
}

Image haar2_forward(const Image& image) {
  const std::size_t n = square_side(image);
  Image out = image;
  std::vector<double> tmp(n);
  const double r = std::numbers::sqrt2 / 2.0;
  for (std::size_t s = n; s >= 2; s /= 2) {
    const std::size_t h = s / 2;
    for (std::size_t row = 0; row < s; ++row) {
      for (std::size_t i = 0; i < h; ++i) {
        const double a = out(row, 2 * i), b = out(row, 2 * i + 1);
        tmp[i] = r * (a + b);
        tmp[h + i] = r * (a - b);
      }
      for (std::size_t i = 0; i < s; ++i) out(row, i) = tmp[i];
    }
    for (std::size_t col = 0; col < s; ++col) {
      for (std::size_t i = 0; i < h; ++i) {
        const double a = out(2 * i, col), b = out(2 * i + 1, col);
        tmp[i] = r * (a + b);
        tmp[h + i] = r * (a - b);
      }
      for (std::size_t i = 0; i < s; ++i) out(i, col) = tmp[i];
    }
  }
  return out;
}

Image haar2_inverse(const Image& coefficients) {
  const std::size_t n = square_side(coefficients);
  Image out = coefficients;
  std::vector<double> tmp(n);
  const double r = std::numbers::sqrt2 / 2.0;
  for (std::size_t s = 2; s <= n; s *= 2) {
    const std::size_t h = s / 2;
    for (std::size_t col = 0; col < s; ++col) {
      for (std::size_t i = 0; i < h; ++i) {
        const double a = out(i, col), d = out(h + i, col);
        tmp[2 * i] = r * (a + d);
        tmp[2 * i + 1] = r * (a - d);
      }
      for (std::size_t i = 0; i < s; ++i) out(i, col) = tmp[i];
    }
    for (std::size_t row = 0; row < s; ++row) {
      for (std::size_t i = 0; i < h; ++i) {
        const double a = out(row, i), d = out(row, h + i);
        tmp[2 * i] = r * (a + d);
        tmp[2 * i + 1] = r * (a - d);
      }
      for (std::size_t i = 0; i < s; ++i) out(row, i) = tmp[i];
    }
  }
  return out;
}

std::vector<HaarSubband> haar2_detail_subbands(const Image& coefficients) {
  const std::size_t n = square_side(coefficients);
  std::vector<HaarSubband> out;
  std::size_t level = 1;
  for (std::size_t s = n / 2; s >= 1; s /= 2, ++level) {
    const std::pair<std::size_t, std::size_t> origin[3] = {{0, s}, {s, 0}, {s, s}};
    const char names[3] = {'H', 'V', 'D'};
    for (int b = 0; b < 3; ++b) {
      HaarSubband band{level, names[b], {}};
      band.coefficients.reserve(s * s);
      for (std::size_t r = 0; r < s; ++r)
        for (std::size_t c = 0; c < s; ++c)
          band.coefficients.push_back(coefficients(origin[b].first + r, origin[b].second + c));
      out.push_back(std::move(band));
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> zigzag_order(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> order;
  order.reserve(n * n);
  if (n == 0) return order;
  for (std::size_t s = 0; s <= 2 * (n - 1); ++s) {
    const std::size_t r_lo = s >= n ? s - (n - 1) : 0;
    const std::size_t r_hi = std::min(s, n - 1);
    if (s % 2 == 1) {
      for (std::size_t r = r_lo; r <= r_hi; ++r) order.emplace_back(r, s - r);
    } else {
      for (std::size_t r = r_hi + 1; r-- > r_lo;) order.emplace_back(r, s - r);
    }
  }
  return order;
}

std::vector<std::size_t> zigzag_indices(std::size_t n, std::size_t count) {
  if (count > n * n) throw std::invalid_argument("zigzag_indices: count exceeds n^2");
  const auto order = zigzag_order(n);
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = order[i].first * n + order[i].second;
  return out;
}

void fwht(std::span<double> values) {
  const std::size_t n = values.size();
  if (!is_power_of_two(n)) throw std::invalid_argument("fwht: size must be a power of two");
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * len) {
      for (std::size_t j = i; j < i + len; ++j) {
        const double a = values[j], b = values[j + len];
        values[j] = a + b;
        values[j + len] = a - b;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& v : values) v *= scale;
}

namespace {

// Orthogonal n x n map: gather by perm, flip signs, then a Hadamard block per
// binary digit of n.
struct MixingStage {
  std::vector<std::size_t> perm;
  std::vector<double> signs;
};

std::vector<std::size_t> hadamard_blocks(std::size_t n) {
  std::vector<std::size_t> blocks;
  for (std::size_t bit = std::size_t{1} << 62; bit; bit >>= 1)
    if (n & bit) blocks.push_back(bit);
  return blocks;
}

void block_fwht(std::vector<double>& v, const std::vector<std::size_t>& blocks) {
  std::size_t offset = 0;
  for (std::size_t b : blocks) {
    fwht(std::span<double>(v.data() + offset, b));
    offset += b;
  }
}

struct Mixer {
  std::size_t n = 0;
  std::vector<std::size_t> blocks;
  std::vector<MixingStage> stages;
  std::vector<std::size_t> rows;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    std::vector<double> cur(x.data(), x.data() + n), next(n);
    for (const auto& st : stages) {
      for (std::size_t i = 0; i < n; ++i) next[i] = st.signs[i] * cur[st.perm[i]];
      block_fwht(next, blocks);
      cur.swap(next);
    }
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) y[i] = cur[rows[i]];
    return y;
  }

  Eigen::VectorXd adjoint(const Eigen::VectorXd& y) const {
    std::vector<double> cur(n, 0.0), next(n);
    for (std::size_t i = 0; i < rows.size(); ++i) cur[rows[i]] = y[i];
    for (auto st = stages.rbegin(); st != stages.rend(); ++st) {
      block_fwht(cur, blocks);
      for (std::size_t i = 0; i < n; ++i) next[st->perm[i]] = st->signs[i] * cur[i];
      cur.swap(next);
    }
    return Eigen::Map<const Eigen::VectorXd>(cur.data(), static_cast<Eigen::Index>(n));
  }
};

}  // namespace

LinearOperator random_mixing_operator(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n == 0 || m == 0 || m > n) throw std::invalid_argument("random_mixing_operator: need 1 <= m <= n");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  auto mixer = std::make_shared<Mixer>();
  mixer->n = n;
  mixer->blocks = hadamard_blocks(n);
  const std::size_t stage_count = is_power_of_two(n) ? 1 : 2;
  for (std::size_t s = 0; s < stage_count; ++s) {
    MixingStage st;
    st.perm.resize(n);
    std::iota(st.perm.begin(), st.perm.end(), 0);
    if (stage_count > 1) std::shuffle(st.perm.begin(), st.perm.end(), rng);
    st.signs.resize(n);
    for (double& v : st.signs) v = coin(rng) ? 1.0 : -1.0;
    mixer->stages.push_back(std::move(st));
  }
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  mixer->rows.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(mixer->rows.begin(), mixer->rows.end());
  return {n, m, [mixer](const Eigen::VectorXd& x) { return mixer->apply(x); },
          [mixer](const Eigen::VectorXd& y) { return mixer->adjoint(y); }, "mix"};
}

std::string scheme_name(const SchemeSpec& spec) {
  struct {
    std::string operator()(const DctLinear&) const { return "dct-linear"; }
    std::string operator()(const DctZigzag&) const { return "dct-zigzag"; }
    std::string operator()(const RombergHybrid&) const { return "romberg"; }
    std::string operator()(const PureRandom&) const { return "random"; }
    std::string operator()(const BandwiseRandom&) const { return "bandwise"; }
  } visitor;
  return std::visit(visitor, spec.variant);
}

bool uses_linear_recon(const SchemeSpec& spec) {
  return std::holds_alternative<DctLinear>(spec.variant);
}

SchemeSpec bandwise_scheme(const MultiResModel& model, std::size_t p, double sigma,
                           std::uint64_t seed) {
  const Allocation allocation = allocate(capacity_diagram(model, sigma), p);
  return {BandwiseRandom{apply_threshold_rule(allocation, model)}, seed};
}

LinearOperator dct_domain_scheme(std::size_t n, std::vector<std::size_t> direct,
                                 std::vector<std::size_t> mixed, std::size_t mixed_rows,
                                 std::uint64_t seed, std::string name) {
  const std::size_t d = n * n;
  for (std::size_t i : direct)
    if (i >= d) throw std::invalid_argument("dct_domain_scheme: index out of range");
  for (std::size_t i : mixed)
    if (i >= d) throw std::invalid_argument("dct_domain_scheme: index out of range");
  if (mixed_rows > mixed.size()) throw std::invalid_argument("dct_domain_scheme: too many mixed rows");
  const std::size_t rows = direct.size() + mixed_rows;
  if (rows == 0) throw std::invalid_argument("dct_domain_scheme: no rows");

  struct State {
    Dct2 dct;
    std::vector<std::size_t> direct, mixed;
    std::optional<LinearOperator> mix;
  };
  auto st = std::make_shared<State>(State{Dct2(n), std::move(direct), std::move(mixed), std::nullopt});
  if (mixed_rows > 0) st->mix = random_mixing_operator(st->mixed.size(), mixed_rows, seed);

  auto apply = [st, n, rows](const Eigen::VectorXd& x) {
    const Image c = st->dct.forward(unflatten(x, n, n));
    const double* cd = c.data();
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < st->direct.size(); ++i) y[i] = cd[st->direct[i]];
    if (st->mix) {
      Eigen::VectorXd sub(static_cast<Eigen::Index>(st->mixed.size()));
      for (std::size_t i = 0; i < st->mixed.size(); ++i) sub[i] = cd[st->mixed[i]];
      y.tail(static_cast<Eigen::Index>(st->mix->out_dim())) = st->mix->apply(sub);
    }
    return y;
  };
  auto adjoint = [st, n](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    Image c = Image::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    double* cd = c.data();
    for (std::size_t i = 0; i < st->direct.size(); ++i) cd[st->direct[i]] = y[i];
    if (st->mix) {
      const Eigen::VectorXd sub = st->mix->adjoint(y.tail(static_cast<Eigen::Index>(st->mix->out_dim())));
      for (std::size_t i = 0; i < st->mixed.size(); ++i) cd[st->mixed[i]] += sub[i];
    }
    Image x = st->dct.inverse(c);
    return flatten(x);
  };
  return {d, rows, apply, adjoint, std::move(name)};
}

LinearOperator build_scheme(const SchemeSpec& spec, const MultiResModel& model, std::size_t p) {
  const std::size_t n = model.side();
  const std::size_t d = model.total_dim();
  if (n == 0) throw std::invalid_argument("build_scheme: model has no image side");
  if (p < 1 || p > d) throw std::invalid_argument("build_scheme: p must be in [1, d]");
  const std::string name = scheme_name(spec);

  if (std::holds_alternative<DctLinear>(spec.variant) || std::holds_alternative<DctZigzag>(spec.variant)) {
    return dct_domain_scheme(n, zigzag_indices(n, p), {}, 0, spec.seed, name);
  }
  if (const auto* romberg = std::get_if<RombergHybrid>(&spec.variant)) {
    if (romberg->n_dct > p) throw std::invalid_argument("build_scheme: n_dct exceeds p");
    auto order = zigzag_indices(n, d);
    std::vector<std::size_t> direct(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(romberg->n_dct));
    std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(romberg->n_dct), order.end());
    return dct_domain_scheme(n, std::move(direct), std::move(rest), p - romberg->n_dct, spec.seed, name);
  }
  if (std::holds_alternative<PureRandom>(spec.variant)) {
    LinearOperator mix = random_mixing_operator(d, p, spec.seed);
    return {d, p, [mix](const Eigen::VectorXd& x) { return mix.apply(x); },
            [mix](const Eigen::VectorXd& y) { return mix.adjoint(y); }, name};
  }
  const ThresholdPlan& plan = std::get<BandwiseRandom>(spec.variant).plan;
  const auto band_of = dct_band_map(n);
  std::vector<int> role(model.band_count(), 0);  // 1 full, 2 mixed
  for (std::size_t l : plan.full_bands) role.at(l) = 1;
  for (std::size_t l : plan.partial_bands) role.at(l) = 2;
  std::vector<std::size_t> direct, mixed;
  for (std::size_t i = 0; i < d; ++i) {
    if (role[band_of[i]] == 1) direct.push_back(i);
    else if (role[band_of[i]] == 2) mixed.push_back(i);
  }
  if (direct.size() + plan.residual_random_count != p) {
    throw std::invalid_argument("build_scheme: band plan covers " +
                                std::to_string(direct.size() + plan.residual_random_count) +
                                " rows, expected " + std::to_string(p));
  }
  return dct_domain_scheme(n, std::move(direct), std::move(mixed), plan.residual_random_count,
                           spec.seed, name);
}

MeasurementSet measure(const LinearOperator& op, const Image& image, double sigma,
                       std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("measure: sigma must be >= 0");
  if (static_cast<std::size_t>(image.size()) != op.in_dim()) {
    throw std::invalid_argument("measure: image has " + std::to_string(image.size()) +
                                " pixels, operator expects " + std::to_string(op.in_dim()));
  }
  MeasurementSet out{op.apply(flatten(image)), sigma, seed, op.name()};
  if (sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& v : out.y) v += noise(rng);
  }
  return out;
}

std::string SchemeConfig::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "scheme=" << scheme << "\np=" << p << "\nn_dct=" << n_dct << "\nseed=" << seed
      << "\nsigma=" << sigma << '\n';
  return out.str();
}

SchemeConfig SchemeConfig::parse(const std::string& text) {
  SchemeConfig config;
  std::istringstream in(text);
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("scheme config: expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "scheme") config.scheme = value;
      else if (key == "p") config.p = std::stoull(value);
      else if (key == "n_dct") config.n_dct = std::stoull(value);
      else if (key == "seed") config.seed = std::stoull(value);
      else if (key == "sigma") config.sigma = std::stod(value);
      else throw std::invalid_argument("unknown key");
    } catch (const std::exception&) {
      throw std::invalid_argument("scheme config: bad entry '" + line + "'");
    }
  }
  return config;
}

SchemeSpec make_scheme_spec(const SchemeConfig& config, const MultiResModel& model) {
  const std::string& s = config.scheme;
  if (s == "dct-linear") return {DctLinear{}, config.seed};
  if (s == "dct-zigzag" || s == "dct-tv") return {DctZigzag{}, config.seed};
  if (s == "romberg") return {RombergHybrid{std::min(config.n_dct, config.p)}, config.seed};
  if (s == "random") return {PureRandom{}, config.seed};
  if (s == "bandwise" || s == "uca") return bandwise_scheme(model, config.p, config.sigma, config.seed);
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

}  // namespace infosense
