#include <doctest.h>

#include <cmath>
#include <random>

#include "tabxai/error.hpp"
#include "tabxai/network.hpp"
#include "tabxai/surrogate.hpp"

using namespace tabxai;

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

PredictFn logistic(const Eigen::VectorXd& a, double b) {
  return [a, b](const RowMatrix& rows) {
    Eigen::VectorXd out(rows.rows());
    for (Eigen::Index r = 0; r < rows.rows(); ++r) out(r) = sigmoid(rows.row(r).dot(a) + b);
    return out;
  };
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.dot(b) / (a.norm() * b.norm()); }

}  // namespace

TEST_CASE("lime recovers the local gradient of a logistic model") {
  Eigen::VectorXd a(6);
  a << 2.0, -1.5, 0.5, 0.0, 3.0, -0.7;
  const double b = -1.2;
  const std::vector<double> x{0.5, 0.5, 0.4, 0.6, 0.5, 0.5};
  const Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), 6);
  const double s = sigmoid(xv.dot(a) + b);
  const Eigen::VectorXd gradient = a * s * (1.0 - s);
  LimeConfig c = LimeConfig::quality();
  c.seed = 42;
  const auto r = lime_explain(logistic(a, b), x, c);
  CHECK(cosine(r.scores, gradient) >= 0.99);
  CHECK(r.method == "lime");
  CHECK(r.seconds > 0.0);
}

TEST_CASE("lime on a constant model gives zero coefficients") {
  const PredictFn constant = [](const RowMatrix& rows) { return Eigen::VectorXd::Constant(rows.rows(), 0.3); };
  const std::vector<double> x{0.2, 0.8, 0.5};
  LimeConfig c;
  c.n_perturbations = 200;
  const auto r = lime_explain(constant, x, c);
  CHECK(r.scores.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("lime is deterministic for a fixed seed") {
  Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(5, -1.0, 1.0);
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5};
  LimeConfig c;
  c.seed = 9;
  const auto r1 = lime_explain(logistic(a, 0.1), x, c);
  const auto r2 = lime_explain(logistic(a, 0.1), x, c);
  CHECK(r1.scores == r2.scores);
  c.seed = 10;
  CHECK(lime_explain(logistic(a, 0.1), x, c).scores != r1.scores);
}

TEST_CASE("lime config validation") {
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5};
  LimeConfig c;
  c.ridge = 0.0;
  c.n_perturbations = 5;
  Eigen::VectorXd a = Eigen::VectorXd::Ones(5);
  CHECK_THROWS_AS(lime_explain(logistic(a, 0.0), x, c), Error);
  c.n_perturbations = 10;
  c.noise_scale = 0.0;
  CHECK_THROWS_AS(lime_explain(logistic(a, 0.0), x, c), Error);
  CHECK(LimeConfig{}.resolved_kernel_width(16) == doctest::Approx(3.0));
}

TEST_CASE("lime without ridge on a degenerate design reports a singular system") {
  // record at the corner with tiny noise: every perturbation clips to the same point
  const std::vector<double> x{1.0, 1.0};
  LimeConfig c;
  c.ridge = 0.0;
  c.n_perturbations = 50;
  c.noise_scale = 1e-300;
  Eigen::VectorXd a = Eigen::VectorXd::Ones(2);
  try {
    lime_explain(logistic(a, 0.0), x, c);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == "singular_system");
  }
}

TEST_CASE("exact shap on an additive model") {
  // f(x) = sum_i f_i(x_i) with nonlinear f_i
  const PredictFn additive = [](const RowMatrix& rows) {
    Eigen::VectorXd out(rows.rows());
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      out(r) = std::sin(rows(r, 0)) + rows(r, 1) * rows(r, 1) - 2.0 * rows(r, 2) + std::exp(rows(r, 3)) +
               std::sqrt(rows(r, 4) + 1.0);
    }
    return out;
  };
  Eigen::VectorXd mean(5);
  mean << 0.5, 0.4, 0.3, 0.2, 0.1;
  const std::vector<double> x{0.9, 0.1, 0.7, 0.6, 0.0};
  ShapConfig c;
  c.mode = ShapMode::exact;
  c.background = mean;
  const auto r = shap_explain(additive, x, c);
  CHECK(r.scores(0) == doctest::Approx(std::sin(0.9) - std::sin(0.5)).epsilon(1e-12));
  CHECK(r.scores(1) == doctest::Approx(0.01 - 0.16).epsilon(1e-12));
  CHECK(r.scores(2) == doctest::Approx(-2.0 * (0.7 - 0.3)).epsilon(1e-12));
  CHECK(r.scores(3) == doctest::Approx(std::exp(0.6) - std::exp(0.2)).epsilon(1e-12));
  CHECK(r.scores(4) == doctest::Approx(1.0 - std::sqrt(1.1)).epsilon(1e-12));
}

TEST_CASE("shap efficiency, symmetry and null record") {
  const auto p = init_params(parse_spec("C3-F6-O2", 8), 4);
  const PredictFn model = [&p](const RowMatrix& rows) { return class1_probabilities(p, rows); };
  Eigen::VectorXd mean = Eigen::VectorXd::Constant(8, 0.4);
  const std::vector<double> x{0.9, 0.1, 0.7, 0.6, 0.0, 0.3, 0.8, 0.2};
  ShapConfig c;
  c.mode = ShapMode::exact;
  c.background = mean;
  const auto r = shap_explain(model, x, c);
  CHECK(std::abs(r.scores.sum() - (r.full_value - r.base_value)) <= 1e-10);

  const std::vector<double> at_mean(mean.data(), mean.data() + 8);
  CHECK(shap_explain(model, at_mean, c).scores.cwiseAbs().maxCoeff() == 0.0);

  // features 0 and 1 enter only through their sum
  const PredictFn symmetric = [](const RowMatrix& rows) {
    Eigen::VectorXd out(rows.rows());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) out(i) = std::tanh(rows(i, 0) + rows(i, 1)) * rows(i, 2);
    return out;
  };
  ShapConfig s;
  s.mode = ShapMode::exact;
  s.background = Eigen::Vector3d(0.2, 0.2, 0.5);
  const std::vector<double> y{0.7, 0.7, 0.9};
  const auto sym = shap_explain(symmetric, y, s);
  CHECK(std::abs(sym.scores(0) - sym.scores(1)) <= 1e-10);
}

TEST_CASE("sampled shap approaches exact shap") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto p = init_params(parse_spec("C4-F8-O2", 10), seed);
    const PredictFn model = [&p](const RowMatrix& rows) { return class1_probabilities(p, rows); };
    std::mt19937_64 rng(seed + 100);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(10);
    for (auto& v : x) v = u(rng);
    ShapConfig exact;
    exact.mode = ShapMode::exact;
    exact.background = Eigen::VectorXd::Constant(10, 0.5);
    ShapConfig sampled = exact;
    sampled.mode = ShapMode::sampled;
    sampled.n_permutations = 2000;
    sampled.seed = 5;
    const auto e = shap_explain(model, x, exact);
    const auto s = shap_explain(model, x, sampled);
    const double spread = std::abs(e.full_value - e.base_value);
    CHECK((e.scores - s.scores).cwiseAbs().mean() <= 0.01 * spread);
    REQUIRE(s.standard_error);
    CHECK(s.standard_error->size() == 10);
    // each permutation telescopes, so sampled efficiency holds exactly too
    CHECK(std::abs(s.scores.sum() - (s.full_value - s.base_value)) <= 1e-10);
  }
}

TEST_CASE("shap mode selection and limits") {
  ShapConfig c;
  c.mode = ShapMode::automatic;
  CHECK(c.resolved_mode(15) == ShapMode::exact);
  CHECK(c.resolved_mode(16) == ShapMode::sampled);
  c.mode = ShapMode::exact;
  c.background = Eigen::VectorXd::Zero(16);
  const std::vector<double> x(16, 0.5);
  const PredictFn f = [](const RowMatrix& rows) { return Eigen::VectorXd::Zero(rows.rows()); };
  try {
    shap_explain(f, x, c);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == "too_many_features");
  }
  c.background = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(shap_explain(f, x, c), Error);
  CHECK(shap_mode_from_string("sampled") == ShapMode::sampled);
}

TEST_CASE("explainers only call the predict function") {
  int calls = 0;
  const PredictFn counted = [&calls](const RowMatrix& rows) {
    ++calls;
    return Eigen::VectorXd(rows.rowwise().sum() / static_cast<double>(rows.cols()));
  };
  const std::vector<double> x{0.2, 0.4, 0.6};
  lime_explain(counted, x, LimeConfig{});
  CHECK(calls == 1);
  ShapConfig c;
  c.background = Eigen::Vector3d::Constant(0.5);
  c.n_permutations = 7;
  shap_explain(counted, x, c);
  CHECK(calls == 8);
}

TEST_CASE("feature_means is the column mean") {
  RowMatrix m(2, 3);
  m << 1, 2, 3, 3, 4, 5;
  CHECK(feature_means(m) == Eigen::Vector3d(2, 3, 4));
  CHECK_THROWS_AS(feature_means(RowMatrix(0, 3)), Error);
}
