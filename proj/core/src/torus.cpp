#include "toruskit/torus.hpp"

#include <cmath>
#include <stdexcept>

namespace toruskit::torus {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

Eigen::Index ResolutionBox::mode_count() const {
  Eigen::Index count = p;
  for (Eigen::Index i = 0; i < K.size(); ++i) count *= 2 * K[i] + 1;
  return count;
}

Eigen::Index mode_index(const ResolutionBox& box, int n, const Eigen::VectorXi& k) {
  if (n < 0 || n >= box.p) throw std::out_of_range("mode_index: n out of range");
  Eigen::Index idx = n;
  for (Eigen::Index i = 0; i < box.K.size(); ++i) {
    if (std::abs(k[i]) > box.K[i]) throw std::out_of_range("mode_index: k out of box");
    idx = idx * (2 * box.K[i] + 1) + (k[i] + box.K[i]);
  }
  return idx;
}

std::pair<int, Eigen::VectorXi> mode_at(const ResolutionBox& box, Eigen::Index idx) {
  Eigen::VectorXi k(box.K.size());
  for (Eigen::Index i = box.K.size() - 1; i >= 0; --i) {
    const Eigen::Index span = 2 * box.K[i] + 1;
    k[i] = static_cast<int>(idx % span) - box.K[i];
    idx /= span;
  }
  if (idx < 0 || idx >= box.p) throw std::out_of_range("mode_at: index out of range");
  return {static_cast<int>(idx), k};
}

Eigen::Index conjugate_index(const ResolutionBox& box, Eigen::Index idx) {
  auto [n, k] = mode_at(box, idx);
  return mode_index(box, (box.p - n) % box.p, Eigen::VectorXi(-k));
}

double mode_frequency(const Eigen::VectorXd& omega, int n, const Eigen::VectorXi& k,
                      int p) {
  const double x = (static_cast<double>(n) + omega.dot(k.cast<double>())) /
                   static_cast<double>(p);
  return x - std::floor(x);
}

Eigen::VectorXd evaluate_torus(const FourierTorus& torus,
                               const Eigen::VectorXd& theta,
                               double extended_angle) {
  const Eigen::Index M = torus.box.mode_count();
  if (static_cast<Eigen::Index>(torus.coeffs.size()) != M)
    throw std::invalid_argument("evaluate_torus: coefficient count mismatch");

  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(torus.D);
  for (Eigen::Index m = 0; m < M; ++m) {
    auto [n, k] = mode_at(torus.box, m);
    const double phase =
        kTwoPi * (static_cast<double>(n) * extended_angle +
                  theta.dot(k.cast<double>()));
    acc += torus.coeffs[static_cast<size_t>(m)] *
           std::complex<double>(std::cos(phase), std::sin(phase));
  }
  const double scale = acc.real().norm();
  if (acc.imag().norm() > 1e-8 * std::max(scale, 1e-300))
    throw std::runtime_error("evaluate_torus: conjugate symmetry violated");
  return acc.real();
}

nlohmann::json torus_to_json(const FourierTorus& torus) {
  nlohmann::json j;
  j["d"] = torus.omega.size();
  j["D"] = torus.D;
  j["p"] = torus.box.p;
  j["omega"] = std::vector<double>(torus.omega.data(),
                                   torus.omega.data() + torus.omega.size());
  j["K"] = std::vector<int>(torus.box.K.data(),
                            torus.box.K.data() + torus.box.K.size());
  j["R_h"] = torus.R_h;
  j["ill_conditioned"] = torus.ill_conditioned;
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(2 * torus.box.mode_count() * torus.D));
  for (const auto& c : torus.coeffs)
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      flat.push_back(c[i].real());
      flat.push_back(c[i].imag());
    }
  j["coeffs"] = std::move(flat);
  return j;
}

FourierTorus torus_from_json(const nlohmann::json& j) {
  FourierTorus t;
  const Eigen::Index d = j.at("d").get<Eigen::Index>();
  t.D = j.at("D").get<int>();
  t.box.p = j.at("p").get<int>();
  const auto om = j.at("omega").get<std::vector<double>>();
  const auto K = j.at("K").get<std::vector<int>>();
  if (static_cast<Eigen::Index>(om.size()) != d ||
      static_cast<Eigen::Index>(K.size()) != d)
    throw std::invalid_argument("torus_from_json: dimension mismatch");
  t.omega = Eigen::Map<const Eigen::VectorXd>(om.data(), d);
  t.box.K = Eigen::Map<const Eigen::VectorXi>(K.data(), d);
  t.R_h = j.at("R_h").get<double>();
  t.ill_conditioned = j.value("ill_conditioned", false);

  const auto flat = j.at("coeffs").get<std::vector<double>>();
  const Eigen::Index M = t.box.mode_count();
  if (static_cast<Eigen::Index>(flat.size()) != 2 * M * t.D)
    throw std::invalid_argument("torus_from_json: coefficient array size mismatch");
  t.coeffs.resize(static_cast<size_t>(M));
  size_t pos = 0;
  for (Eigen::Index m = 0; m < M; ++m) {
    Eigen::VectorXcd c(t.D);
    for (int i = 0; i < t.D; ++i) {
      c[i] = {flat[pos], flat[pos + 1]};
      pos += 2;
    }
    t.coeffs[static_cast<size_t>(m)] = std::move(c);
  }
  return t;
}

}  // namespace toruskit::torus
