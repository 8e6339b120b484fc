#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "tabxai/data.hpp"
#include "tabxai/error.hpp"

using namespace tabxai;

namespace {

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

RawTable numeric_table(const std::vector<std::vector<double>>& cols, std::vector<int> labels) {
  RawTable t;
  for (const auto& c : cols) t.columns.push_back({c, {}});
  t.labels = std::move(labels);
  return t;
}

FeatureSchema continuous_schema(std::size_t n) {
  FeatureSchema s;
  s.label_column = "y";
  for (std::size_t i = 0; i < n; ++i) {
    ColumnSpec c;
    c.name = "x" + std::to_string(i);
    c.kind = ColumnKind::continuous;
    s.columns.push_back(c);
  }
  return s;
}

}  // namespace

TEST_CASE("load_table infers a three-valued categorical") {
  const std::string text =
      "color,size,flag,label\n"
      "red,1.5,0,1\n"
      "green,2.5,1,0\n"
      "blue,3.0,1,1\n"
      "red,4.0,0,0\n"
      "green,0.5,1,0\n";
  const auto loaded = load_table_from_text(text, std::nullopt);
  REQUIRE(loaded.schema.columns.size() == 3);
  CHECK(loaded.schema.columns[0].kind == ColumnKind::categorical);
  CHECK(loaded.schema.columns[0].values.size() == 3);
  CHECK(loaded.schema.columns[1].kind == ColumnKind::continuous);
  CHECK(loaded.schema.columns[2].kind == ColumnKind::binary);
  CHECK(loaded.schema.n_encoded() == 5);
  CHECK(loaded.table.labels == std::vector<int>{1, 0, 1, 0, 0});
}

TEST_CASE("load_table infers positive label from Yes/No") {
  const auto loaded = load_table_from_text("a,Churn\n1,No\n2,Yes\n3,No\n", std::nullopt);
  CHECK(loaded.schema.positive_label == "Yes");
  CHECK(loaded.table.labels == std::vector<int>{0, 1, 0});
}

TEST_CASE("header-only CSV leaves kinds unknown and fails schema validation") {
  try {
    load_table_from_text("a,b,label\n", std::nullopt);
    FAIL("expected schema error");
  } catch (const Error& e) {
    CHECK(e.code() == "schema_error");
  }
}

TEST_CASE("load errors name the problem") {
  SUBCASE("unknown label column") {
    try {
      load_table_from_text("a,b\n1,0\n", std::nullopt, "target");
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == "unknown_label_column");
    }
  }
  SUBCASE("non-parsable numeric cell names row and column") {
    auto schema = continuous_schema(1);
    schema.columns[0].name = "a";
    schema.label_column = "y";
    try {
      load_table_from_text("a,y\n1,0\nnope,1\n", schema);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == "bad_number");
      const std::string msg = e.what();
      CHECK(msg.find("row 2") != std::string::npos);
      CHECK(msg.find("'a'") != std::string::npos);
    }
  }
  SUBCASE("ragged rows") { CHECK_THROWS_AS(load_table_from_text("a,y\n1\n", std::nullopt), Error); }
}

TEST_CASE("telecom schema encodes 28 features") {
  const auto s = telecom_churn_schema();
  CHECK(s.n_encoded() == 28);
  const auto names = s.encoded_names();
  CHECK(std::find(names.begin(), names.end(), "Contract_M_to_M") != names.end());
  CHECK(std::find(names.begin(), names.end(), "IS_Fiber_Optic") != names.end());
  CHECK(card_fraud_schema().n_encoded() == 30);
}

TEST_CASE("telecom rows load with aliases and blank totals") {
  const std::string header =
      "customerID,gender,SeniorCitizen,Partner,Dependents,tenure,PhoneService,MultipleLines,InternetService,"
      "OnlineSecurity,OnlineBackup,DeviceProtection,TechSupport,StreamingTV,StreamingMovies,Contract,"
      "PaperlessBilling,PaymentMethod,MonthlyCharges,TotalCharges,Churn\n";
  const std::string rows =
      "7590-VHVEG,Female,0,Yes,No,1,No,No phone service,DSL,No,Yes,No,No,No,No,Month-to-month,Yes,"
      "Electronic check,29.85,29.85,No\n"
      "5575-GNVDE,Male,1,No,No,0,Yes,No,No,No internet service,No internet service,No internet service,"
      "No internet service,No internet service,No internet service,Two year,No,Mailed check,56.95, ,Yes\n";
  const auto loaded = load_table_from_text(header + rows, telecom_churn_schema());
  const auto state = fit_encoder(loaded.table, loaded.schema, iota_indices(2), false);
  const auto m = encode(loaded.table, state);
  REQUIRE(m.cols() == 28);
  CHECK(m.labels == std::vector<int>{0, 1});
  const auto& names = m.feature_names;
  auto col = [&](const std::string& n) {
    return static_cast<Eigen::Index>(std::find(names.begin(), names.end(), n) - names.begin());
  };
  CHECK(m.values(0, col("Contract_M_to_M")) == 1.0);
  CHECK(m.values(1, col("Contract_2yr")) == 1.0);
  CHECK(m.values(0, col("ML_No_PhService")) == 1.0);
  CHECK(m.values(1, col("Gender")) == 1.0);
  CHECK(m.values(1, col("OnlineSecurity")) == 0.0);
  CHECK(m.values(1, col("TotalCharges")) == 0.0);
}

TEST_CASE("fit_encoder on {2,4,6} uses population sd and maps training rows to [0,1]") {
  const auto t = numeric_table({{2, 4, 6}}, {0, 1, 0});
  const auto state = fit_encoder(t, continuous_schema(1), iota_indices(3), false);
  CHECK(state.numeric[0].mean == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(state.numeric[0].sd == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-15));
  const auto m = encode(t, state);
  CHECK(m.values(0, 0) == doctest::Approx(0.0));
  CHECK(m.values(1, 0) == doctest::Approx(0.5));
  CHECK(m.values(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("z-score then min-max composition matches a hand computation") {
  // Training rows 0..2, row 3 is an out-of-range test value.
  const std::vector<double> a{1.0, 2.0, 4.0, 10.0};
  const std::vector<double> b{-3.0, 0.0, 3.0, -1.5};
  const auto t = numeric_table({a, b}, {0, 1, 1, 0});
  const std::vector<std::size_t> train{0, 1, 2};
  const auto state = fit_encoder(t, continuous_schema(2), train, false);
  const auto m = encode(t, state);

  for (int c = 0; c < 2; ++c) {
    const auto& v = c == 0 ? a : b;
    const double mean = (v[0] + v[1] + v[2]) / 3.0;
    const double sd =
        std::sqrt(((v[0] - mean) * (v[0] - mean) + (v[1] - mean) * (v[1] - mean) + (v[2] - mean) * (v[2] - mean)) / 3.0);
    double zlo = 1e300, zhi = -1e300;
    for (int r = 0; r < 3; ++r) {
      zlo = std::min(zlo, (v[r] - mean) / sd);
      zhi = std::max(zhi, (v[r] - mean) / sd);
    }
    for (int r = 0; r < 4; ++r) {
      const double expect = std::clamp(((v[r] - mean) / sd - zlo) / (zhi - zlo), 0.0, 1.0);
      CHECK(m.values(r, c) == doctest::Approx(expect).epsilon(1e-14));
    }
  }
  CHECK(m.values(3, 0) == 1.0);  // clipped
  CHECK(m.values(3, 1) == doctest::Approx(0.25));
}

TEST_CASE("record normalisation makes each row max exactly 1") {
  const auto t = numeric_table({{1, 2, 4, 8}, {8, 4, 2, 1}, {0, 4, 1, 2}}, {0, 1, 0, 1});
  const auto state = fit_encoder(t, continuous_schema(3), iota_indices(4), true);
  const auto m = encode(t, state);
  for (Eigen::Index r = 0; r < m.values.rows(); ++r) CHECK(m.values.row(r).maxCoeff() == 1.0);
}

TEST_CASE("all-zero rows are left unchanged by record normalisation") {
  FeatureSchema s;
  s.label_column = "y";
  ColumnSpec c;
  c.name = "b";
  c.kind = ColumnKind::binary;
  s.columns = {c, c};
  s.columns[1].name = "b2";
  const auto t = numeric_table({{0, 1}, {0, 0}}, {0, 1});
  const auto m = encode(t, fit_encoder(t, s, iota_indices(2), true));
  CHECK(m.values.row(0).sum() == 0.0);
  CHECK(s.n_encoded() == 2);  // all-binary schema keeps its width
}

TEST_CASE("zero-variance column encodes as 0.5 with a warning") {
  const auto t = numeric_table({{3, 3, 3}}, {0, 1, 0});
  const auto state = fit_encoder(t, continuous_schema(1), iota_indices(3), false);
  CHECK(state.warnings.size() == 1);
  const auto m = encode(t, state);
  CHECK((m.values.array() == 0.5).all());
}

TEST_CASE("unseen category encodes as an all-zero group with a warning") {
  const auto loaded = load_table_from_text("c,y\na,0\nb,1\nc,0\nd,1\n", std::nullopt);
  const std::vector<std::size_t> train{0, 1, 2};
  auto state = fit_encoder(loaded.table, loaded.schema, train, false);
  // fitted on the schema inferred from all rows; drop "d" to simulate an unseen value
  state.schema.columns[0].values = {"a", "b", "c"};
  Warnings w;
  const auto m = encode(loaded.table, state, &w);
  CHECK(m.cols() == 3);
  CHECK(m.values.row(3).sum() == 0.0);
  for (Eigen::Index r = 0; r < 3; ++r) CHECK(m.values.row(r).sum() == 1.0);
  CHECK(w.size() == 1);
}

TEST_CASE("encoder statistics ignore test rows") {
  auto t = numeric_table({{1, 2, 3, 4, 5, 6}}, {0, 1, 0, 1, 0, 1});
  const std::vector<std::size_t> train{0, 1, 2, 3};
  const auto clean = fit_encoder(t, continuous_schema(1), train, true);
  t.columns[0].numbers[4] = 1e12;
  t.columns[0].numbers[5] = -1e12;
  const auto poisoned = fit_encoder(t, continuous_schema(1), train, true);
  CHECK(clean.fingerprint() == poisoned.fingerprint());
}

TEST_CASE("encoder and split JSON round-trip") {
  const auto t = numeric_table({{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}}, {0, 1, 0, 1, 0, 1, 0, 1, 0, 1});
  const auto state = fit_encoder(t, continuous_schema(1), iota_indices(10), true);
  nlohmann::json j = state;
  const auto back = j.get<EncoderState>();
  CHECK(back.fingerprint() == state.fingerprint());

  const auto plan = stratified_split(t.labels, 0.8, 2, 9);
  nlohmann::json js = plan;
  const auto p2 = js.get<SplitPlan>();
  CHECK(p2.train_indices == plan.train_indices);
  CHECK(p2.fold_of == plan.fold_of);
  CHECK(p2.test_indices == plan.test_indices);
}

TEST_CASE("stratified split of 100 rows with 26 positives") {
  std::vector<int> labels(100, 0);
  for (int i = 0; i < 26; ++i) labels[static_cast<std::size_t>(i * 3)] = 1;
  const auto plan = stratified_split(labels, 0.8, 5, 123);
  CHECK(plan.test_indices.size() >= 20);
  CHECK(plan.test_indices.size() <= 21);
  int test_pos = 0;
  for (auto i : plan.test_indices) test_pos += labels[i];
  CHECK(std::abs(test_pos - 5) <= 1);
  for (int f = 0; f < 5; ++f) {
    int pos = 0;
    for (auto i : plan.fold_members(f)) pos += labels[i];
    CHECK(pos >= 3);
    CHECK(pos <= 6);
  }
  std::set<std::size_t> all(plan.train_indices.begin(), plan.train_indices.end());
  for (auto i : plan.test_indices) CHECK(all.insert(i).second);
  CHECK(all.size() == 100);
}

TEST_CASE("stratified split is deterministic and keeps fold proportions") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 60 + rng() % 200;
    std::vector<int> labels(n);
    const double p = 0.1 + 0.4 * static_cast<double>(rng() % 100) / 100.0;
    for (auto& l : labels) l = (static_cast<double>(rng() % 1000) / 1000.0) < p ? 1 : 0;
    if (std::count(labels.begin(), labels.end(), 1) < 12 || std::count(labels.begin(), labels.end(), 0) < 12) continue;
    const auto a = stratified_split(labels, 0.8, 5, trial);
    const auto b = stratified_split(labels, 0.8, 5, trial);
    CHECK(a.train_indices == b.train_indices);
    CHECK(a.fold_of == b.fold_of);
    const double global = static_cast<double>(std::count(labels.begin(), labels.end(), 1)) / static_cast<double>(n);
    for (int f = 0; f < 5; ++f) {
      const auto members = a.fold_members(f);
      double pos = 0;
      for (auto i : members) pos += labels[i];
      const double size = static_cast<double>(members.size());
      CHECK(std::abs(pos / size - global) <= 1.0 / size + 1e-12);
    }
    double test_pos = 0;
    for (auto i : a.test_indices) test_pos += labels[i];
    const double tsize = static_cast<double>(a.test_indices.size());
    CHECK(std::abs(test_pos / tsize - global) <= 1.0 / tsize + 1e-12);
  }
}

TEST_CASE("stratified split precondition errors") {
  CHECK_THROWS_AS(stratified_split(std::vector<int>(20, 1), 0.8, 5, 1), Error);
  std::vector<int> few(30, 0);
  few[0] = few[1] = few[2] = 1;
  CHECK_THROWS_AS(stratified_split(few, 0.8, 5, 1), Error);
  CHECK_THROWS_AS(stratified_split(std::vector<int>{0, 1, 0, 1}, 0.8, 1, 1), Error);
}

TEST_CASE("smote on balanced input is a no-op") {
  EncodedMatrix m;
  m.values = RowMatrix::Random(6, 3);
  m.labels = {0, 1, 0, 1, 0, 1};
  m.provenance.assign(6, Provenance::real);
  const auto out = smote(m, {5, 1});
  CHECK(out.values == m.values);
  CHECK(out.labels == m.labels);
}

TEST_CASE("smote with two minority points stays on their segment") {
  EncodedMatrix m;
  m.values.resize(8, 3);
  m.values << 0.1, 0.2, 0.3,  //
      0.9, 0.5, 0.1,          //
      0, 0, 0, 1, 1, 1, 0.5, 0.5, 0.5, 0.2, 0.2, 0.2, 0.3, 0.1, 0.0, 0.7, 0.7, 0.7;
  m.labels = {1, 1, 0, 0, 0, 0, 0, 0};
  m.provenance.assign(8, Provenance::real);
  const auto out = smote(m, {1, 3});
  CHECK(out.count(1) == out.count(0));
  const Eigen::RowVectorXd a = m.values.row(0), b = m.values.row(1);
  const Eigen::RowVectorXd d = b - a;
  for (std::size_t r = 8; r < out.rows(); ++r) {
    CHECK(out.provenance[r] == Provenance::synthetic);
    const Eigen::RowVectorXd x = out.values.row(static_cast<Eigen::Index>(r));
    const double lambda = (x - a).dot(d) / d.squaredNorm();
    CHECK(lambda >= -1e-12);
    CHECK(lambda <= 1.0 + 1e-12);
    CHECK((x - (a + lambda * d)).norm() <= 1e-12);
  }
}

TEST_CASE("smote falls back to fewer neighbours and rejects a single minority row") {
  EncodedMatrix m;
  m.values = RowMatrix::Random(6, 2);
  m.labels = {1, 1, 0, 0, 0, 0};
  m.provenance.assign(6, Provenance::real);
  Warnings w;
  const auto out = smote(m, {5, 2}, &w);
  CHECK(w.size() == 1);
  CHECK(out.count(1) == 4);
  m.labels = {1, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(smote(m, {5, 2}), Error);
}

TEST_CASE("smote never reads test rows") {
  EncodedMatrix all;
  all.values = RowMatrix::Random(40, 4).cwiseAbs();
  all.labels.assign(40, 0);
  for (int i = 0; i < 40; i += 4) all.labels[static_cast<std::size_t>(i)] = 1;
  all.provenance.assign(40, Provenance::real);
  const auto plan = stratified_split(all.labels, 0.8, 2, 4);
  const auto a = smote(all.select_rows(plan.train_indices), {3, 8});
  for (auto i : plan.test_indices) all.values.row(static_cast<Eigen::Index>(i)).setConstant(1e9);
  const auto b = smote(all.select_rows(plan.train_indices), {3, 8});
  CHECK(a.values == b.values);
}
