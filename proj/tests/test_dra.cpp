#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "qaml/dra.hpp"
#include "qaml/errors.hpp"
#include "qaml/rng.hpp"
#include "support/superop.hpp"

using namespace qaml;

namespace {

constexpr double kPi = 3.14159265358979323846;

DraModel binary_model(int layers, DraAnsatz ansatz, int feature_dim,
                      uint64_t seed) {
  DraModel m;
  m.layers = layers;
  m.ansatz = ansatz;
  m.label_states = label_states_for(2);
  m.theta.resize(layers, feature_dim + 1);
  SplitMix64 rng(seed);
  for (long i = 0; i < m.theta.rows(); ++i)
    for (long j = 0; j < m.theta.cols(); ++j)
      m.theta(i, j) = rng.uniform(-kPi, kPi);
  return m;
}

Eigen::VectorXd random_features(int dim, uint64_t seed) {
  SplitMix64 rng(seed);
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x[i] = rng.uniform(-2, 2);
  return x;
}

}  // namespace

TEST_CASE("augment appends the bias slot") {
  Eigen::VectorXd x(2);
  x << 0.3, -0.7;
  const Eigen::VectorXd a = augment(x);
  REQUIRE(a.size() == 3);
  CHECK(a[0] == 0.3);
  CHECK(a[1] == -0.7);
  CHECK(a[2] == 1.0);

  const Eigen::VectorXd empty = augment(Eigen::VectorXd(0));
  REQUIRE(empty.size() == 1);
  CHECK(empty[0] == 1.0);

  for (int n : {1, 5, 17}) {
    CHECK(augment(Eigen::VectorXd::Zero(n)).size() == n + 1);
  }
}

TEST_CASE("label states are pure and maximally separated") {
  SUBCASE("binary: orthogonal poles") {
    const auto s = label_states_for(2);
    REQUIRE(s.size() == 2);
    CHECK(projection_probability(s[0], s[1]) == doctest::Approx(0.0));
    CHECK(bloch_vector(s[0]).dot(bloch_vector(s[1])) == doctest::Approx(-1.0));
  }
  SUBCASE("three classes: 120-degree fan in the x-z plane") {
    const auto s = label_states_for(3);
    REQUIRE(s.size() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(is_pure(s[i]));
      CHECK(std::abs(bloch_vector(s[i])[1]) < 1e-14);  // y = 0 plane
      for (int j = i + 1; j < 3; ++j) {
        CHECK(bloch_vector(s[i]).dot(bloch_vector(s[j])) ==
              doctest::Approx(-0.5).epsilon(1e-12));
      }
    }
  }
  SUBCASE("four classes: tetrahedral overlaps") {
    const auto s = label_states_for(4);
    REQUIRE(s.size() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(is_pure(s[i]));
      for (int j = i + 1; j < 4; ++j) {
        CHECK(bloch_vector(s[i]).dot(bloch_vector(s[j])) ==
              doctest::Approx(-1.0 / 3).epsilon(1e-12));
      }
    }
  }
  CHECK_THROWS_AS(label_states_for(5), std::invalid_argument);
}

TEST_CASE("identity and single-layer circuits leave |0>") {
  SUBCASE("all-zero theta") {
    DraModel m = binary_model(7, DraAnsatz::Alternating, 2, 1);
    m.theta.setZero();
    const Eigen::VectorXd p = dra_forward(m, random_features(2, 9));
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("L=1 is an Rz layer, inert on |0>") {
    const DraModel m = binary_model(1, DraAnsatz::Alternating, 2, 2);
    for (uint64_t s : {10ull, 11ull, 12ull}) {
      const Eigen::VectorXd p = dra_forward(m, random_features(2, s));
      CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("an even layer driven to pi flips the qubit") {
  DraModel m = binary_model(2, DraAnsatz::Alternating, 1, 3);
  // Layer 1 (Rz) arbitrary; layer 2 (Ry) angle = theta . [x, 1] = pi.
  m.theta.row(1) << 0.0, kPi;
  Eigen::VectorXd x(1);
  x << 0.37;
  const Eigen::VectorXd p = dra_forward(m, x);
  CHECK(p[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("prediction is argmax with low-index tie breaking") {
  Eigen::VectorXd a(2), b(2), c(3);
  a << 0.9, 0.1;
  b << 0.5, 0.5;
  c << 0.2, 0.3, 0.5;
  CHECK(argmax_class(a) == 0);
  CHECK(argmax_class(b) == 0);
  CHECK(argmax_class(c) == 2);
}

TEST_CASE("forward matches the superoperator oracle gate by gate") {
  for (DraAnsatz ansatz : {DraAnsatz::Alternating, DraAnsatz::ZyPair}) {
    const DraModel m = binary_model(5, ansatz, 3, 42);
    for (uint64_t fs : {100ull, 101ull}) {
      const Eigen::VectorXd x = random_features(3, fs);
      const Eigen::VectorXd xa = augment(x);

      // Independent composition: build the whole circuit as one 4x4 map.
      Eigen::Matrix4cd comp = Eigen::Matrix4cd::Identity();
      for (int l = 1; l <= m.layers; ++l) {
        const double angle = m.theta.row(l - 1).dot(xa);
        if (ansatz == DraAnsatz::Alternating) {
          const char axis = (l % 2 == 1) ? 'z' : 'y';
          comp = oracle::superop_from_kraus({oracle::rotation(axis, angle)}) *
                 comp;
        } else {
          comp = oracle::superop_from_kraus({oracle::rotation('y', angle)}) *
                 comp;
          comp = oracle::superop_from_kraus({oracle::rotation('z', angle)}) *
                 comp;
        }
      }
      const Eigen::Matrix2cd rho =
          oracle::apply_superop(comp, ground_state());

      const Eigen::VectorXd got = dra_forward(m, x);
      for (int c = 0; c < 2; ++c) {
        const double want =
            (rho * m.label_states[std::size_t(c)]).trace().real();
        CHECK(got[c] == doctest::Approx(want).epsilon(1e-10));
      }
      const QubitState enc = dra_encode(m, x);
      CHECK((enc - rho).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("adding 2*pi to a layer angle changes nothing") {
  for (DraAnsatz ansatz : {DraAnsatz::Alternating, DraAnsatz::ZyPair}) {
    DraModel m = binary_model(7, ansatz, 2, 77);
    const Eigen::VectorXd x = random_features(2, 5);
    const Eigen::VectorXd before = dra_forward(m, x);
    // The bias slot shifts the layer angle directly.
    m.theta(3, 2) += 2.0 * kPi;
    const Eigen::VectorXd after = dra_forward(m, x);
    CHECK((before - after).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("binary orthogonal outputs sum to one") {
  for (uint64_t s = 0; s < 20; ++s) {
    const DraModel m = binary_model(7, DraAnsatz::Alternating, 2, 1000 + s);
    const Eigen::VectorXd p = dra_forward(m, random_features(2, 2000 + s));
    CHECK(std::abs(p.sum() - 1.0) < 1e-9);
  }
}

TEST_CASE("multiclass outputs renormalize to one") {
  for (int classes : {3, 4}) {
    DraModel m = binary_model(7, DraAnsatz::Alternating, 2, 31);
    m.label_states = label_states_for(classes);
    const Eigen::VectorXd p = dra_forward(m, random_features(2, 32));
    CHECK(p.size() == classes);
    CHECK(std::abs(p.sum() - 1.0) < 1e-12);
    CHECK(p.minCoeff() >= 0.0);
  }
}

TEST_CASE("depolarizing gate noise can only flatten the winner") {
  for (uint64_t s = 0; s < 10; ++s) {
    DraModel clean = binary_model(7, DraAnsatz::Alternating, 2, 400 + s);
    DraModel noisy = clean;
    noisy.noise.per_gate = {{ChannelKind::Depolarizing, 0.05}};
    const Eigen::VectorXd x = random_features(2, 500 + s);
    CHECK(dra_forward(noisy, x).maxCoeff() <=
          dra_forward(clean, x).maxCoeff() + 1e-12);
  }
}

TEST_CASE("tied theta rows cycle across layers") {
  DraModel tied = binary_model(7, DraAnsatz::Alternating, 2, 88);
  tied.theta = tied.theta.topRows(3).eval();  // 3 groups over 7 layers

  DraModel expanded = tied;
  expanded.theta.resize(7, 3);
  for (int l = 0; l < 7; ++l) expanded.theta.row(l) = tied.theta.row(l % 3);

  CHECK(tied.param_count() == 9);
  for (uint64_t s = 0; s < 5; ++s) {
    const Eigen::VectorXd x = random_features(2, 600 + s);
    CHECK((dra_forward(tied, x) - dra_forward(expanded, x))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }
}

TEST_CASE("evaluate computes accuracy, records and shot estimates") {
  // A model that cleanly separates x > 0 from x < 0: single Ry layer with
  // angle = (pi/2) x + pi/2 maps x=1 to |1> and x=-1 to |0>.
  DraModel m;
  m.layers = 2;
  m.ansatz = DraAnsatz::Alternating;
  m.label_states = label_states_for(2);
  m.theta.resize(2, 2);
  m.theta.row(0).setZero();               // Rz, inert
  m.theta.row(1) << kPi / 2.0, kPi / 2.0;  // Ry(pi/2 x + pi/2)

  Eigen::MatrixXd features(4, 1);
  features << -1.0, -0.8, 0.8, 1.0;
  const std::vector<int> labels{0, 0, 1, 1};

  SUBCASE("exact mode") {
    const Evaluation ev = dra_evaluate(m, features, labels);
    CHECK(ev.accuracy == doctest::Approx(1.0));
    REQUIRE(ev.records.size() == 4);
    CHECK(ev.records[0].p_a > 0.9);
    CHECK(ev.records[0].shot_counts.empty());
    CHECK(ev.records[3].predicted == 1);
    CHECK(ev.records[3].truth == 1);

    const Evaluation again = dra_evaluate(m, features, labels);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK((again.records[i].probabilities - ev.records[i].probabilities)
                .cwiseAbs()
                .maxCoeff() == 0.0);
    }
  }

  SUBCASE("shot mode is a seeded estimate") {
    const Evaluation a = dra_evaluate(m, features, labels, 512, 9);
    const Evaluation b = dra_evaluate(m, features, labels, 512, 9);
    const Evaluation c = dra_evaluate(m, features, labels, 512, 10);
    REQUIRE(a.records.size() == 4);
    bool any_difference = false;
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(a.records[i].shot_counts.size() == 2);
      CHECK(a.records[i].shot_counts[0] + a.records[i].shot_counts[1] == 512);
      CHECK(a.records[i].shot_counts == b.records[i].shot_counts);
      any_difference |= a.records[i].shot_counts != c.records[i].shot_counts;
      // 512 shots at p > 0.9 cannot miss the margin.
      CHECK(a.records[i].predicted == labels[i]);
    }
    CHECK(any_difference);
  }

  SUBCASE("thread count does not change results") {
    const Evaluation a = dra_evaluate(m, features, labels, 512, 9, 1);
    const Evaluation b = dra_evaluate(m, features, labels, 512, 9, 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(a.records[i].shot_counts == b.records[i].shot_counts);
    }
  }
}

TEST_CASE("dimension mismatches are rejected") {
  const DraModel m = binary_model(3, DraAnsatz::Alternating, 2, 5);
  CHECK_THROWS_AS(dra_forward(m, Eigen::VectorXd::Zero(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(dra_evaluate(m, Eigen::MatrixXd::Zero(0, 2), {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(dra_evaluate(m, Eigen::MatrixXd::Zero(3, 2), {0, 1}),
                  std::invalid_argument);
}

TEST_CASE("models survive a json round trip") {
  namespace fs = std::filesystem;
  DraModel m = binary_model(7, DraAnsatz::ZyPair, 2, 1234);
  m.noise = device_like_noise();
  m.label_states = label_states_for(3);

  const fs::path tmp = fs::temp_directory_path() / "qaml_dra_roundtrip.json";
  save_dra(m, tmp.string());
  const DraModel back = load_dra(tmp.string());
  CHECK(back.layers == m.layers);
  CHECK((back.ansatz == m.ansatz));
  CHECK((back.theta - m.theta).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE(back.label_states.size() == 3);
  CHECK(back.noise.per_gate.size() == 3);
  CHECK(back.noise.readout_flip == doctest::Approx(0.01));

  const Eigen::VectorXd x = random_features(2, 4321);
  CHECK((dra_forward(back, x) - dra_forward(m, x)).cwiseAbs().maxCoeff() <
        1e-12);
  fs::remove(tmp);

  CHECK_THROWS_AS(load_dra("/nonexistent/model.json"), FormatError);
}
