#include <gtest/gtest.h>

#include <atomic>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "newsxlt/embeddings.hpp"
#include "newsxlt/remote.hpp"

// After Eigen: resolv.h, pulled in by httplib, defines a _res macro.
#include <httplib.h>
#include <json.hpp>

using namespace newsxlt;
using Matrix = EmbeddingTablef::Matrix;

namespace {

EmbeddingTablef random_table(std::size_t n, Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  Matrix m(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = g(rng);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("N" + std::to_string(i * 7 + 1));
  return EmbeddingTablef(ids, m);
}

}  // namespace

TEST(Embeddings, BinaryRoundTrip) {
  const auto t = random_table(3, 4, 1);
  std::stringstream ss;
  write_embeddings_binary(t, ss);
  const auto back = read_embeddings(ss);
  EXPECT_EQ(back, t);
  EXPECT_EQ(back.dim(), 4);
}

TEST(Embeddings, TsvRoundTripIsExact) {
  const auto t = random_table(50, 16, 2);
  std::stringstream ss;
  write_embeddings_tsv(t, ss);
  EXPECT_EQ(read_embeddings(ss), t);
}

TEST(Embeddings, CrossFormatEquality) {
  const auto t = random_table(20, 8, 3);
  testing_util::TempDir dir;
  {
    std::ofstream b(dir / "t.nbem", std::ios::binary);
    write_embeddings_binary(t, b);
    std::ofstream s(dir / "t.tsv", std::ios::binary);
    write_embeddings_tsv(t, s);
  }
  EXPECT_EQ(load_embeddings(dir / "t.nbem"), load_embeddings(dir / "t.tsv"));
}

TEST(Embeddings, BinaryLayout) {
  Matrix m(1, 2);
  m << 1.0f, -2.0f;
  std::stringstream ss;
  write_embeddings_binary(EmbeddingTablef({"ab"}, m), ss);
  const std::string bytes = ss.str();
  const std::string expected("NBEM\x01\x02\x00\x00\x00\x01\x00\x00\x00\x00\x00\x00\x00\x02\x00" "ab"
                             "\x00\x00\x80\x3f\x00\x00\x00\xc0",
                             4 + 1 + 4 + 8 + 2 + 2 + 8);
  EXPECT_EQ(bytes, expected);
}

TEST(Embeddings, TsvDimMismatchNamesId) {
  std::stringstream ss("N1\t1,2,3,4\nN2\t1,2,3\n");
  try {
    read_embeddings(ss);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("N2"), std::string::npos);
  }
}

TEST(Embeddings, NonFiniteRejected) {
  std::stringstream ss("N1\t1,nan\n");
  EXPECT_THROW(read_embeddings(ss), Error);
  Matrix m(1, 2);
  m << 1.0f, std::numeric_limits<float>::infinity();
  EXPECT_THROW(EmbeddingTablef({"x"}, m), Error);
}

TEST(Embeddings, DuplicateIdRejected) {
  std::stringstream ss("N1\t1,2\nN1\t3,4\n");
  EXPECT_THROW(read_embeddings(ss), Error);
}

TEST(Embeddings, TruncatedBinaryRejected) {
  std::stringstream ss;
  write_embeddings_binary(random_table(3, 4, 5), ss);
  std::string bytes = ss.str();
  bytes.resize(bytes.size() - 3);
  std::stringstream cut(bytes);
  EXPECT_THROW(read_embeddings(cut), Error);
}

TEST(Embeddings, MissingIdIsCoverageError) {
  const auto t = random_table(2, 3, 6);
  EXPECT_THROW(t.row_of("nope"), CoverageError);
  EXPECT_TRUE(t.contains("N1"));
}

TEST(L2Normalize, ThreeFourFive) {
  Matrix m(1, 2);
  m << 3.0f, 4.0f;
  const auto n = l2_normalize(EmbeddingTablef({"a"}, m));
  EXPECT_NEAR(n.row("a")(0), 0.6f, 1e-7);
  EXPECT_NEAR(n.row("a")(1), 0.8f, 1e-7);
  EXPECT_TRUE(n.normalized());
}

TEST(L2Normalize, Idempotent) {
  const auto once = l2_normalize(random_table(100, 32, 7));
  const auto twice = l2_normalize(once);
  EXPECT_LE((once.matrix() - twice.matrix()).cwiseAbs().maxCoeff(), 1e-7f);
  for (Eigen::Index r = 0; r < once.matrix().rows(); ++r)
    EXPECT_NEAR(once.matrix().row(r).cast<double>().norm(), 1.0, 1e-5);
}

TEST(L2Normalize, ZeroVectorNamesId) {
  Matrix m(2, 2);
  m << 1.0f, 0.0f, 0.0f, 0.0f;
  try {
    l2_normalize(EmbeddingTablef({"ok", "zero"}, m));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("zero"), std::string::npos);
  }
}

namespace {

// In-process embedding service on an ephemeral port.
class FakeEncoder {
 public:
  explicit FakeEncoder(int extra_vectors = 0) {
    server_.Post("/embed", [extra_vectors](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json vectors = nlohmann::json::array();
      for (const auto& t : body.at("texts")) {
        const auto s = t.get<std::string>();
        vectors.push_back({static_cast<double>(s.size()), static_cast<double>(s.empty() ? 0 : s[0])});
      }
      for (int i = 0; i < extra_vectors; ++i) vectors.push_back({0.0, 0.0});
      res.set_content(nlohmann::json{{"vectors", vectors}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEncoder() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST(RemoteEmbeddings, OrderPreserved) {
  FakeEncoder enc;
  const auto v = fetch_remote_embeddings(enc.endpoint(), {"abc", "z"});
  ASSERT_EQ(v.rows(), 2);
  ASSERT_EQ(v.cols(), 2);
  EXPECT_EQ(v(0, 0), 3.0f);
  EXPECT_EQ(v(0, 1), static_cast<float>('a'));
  EXPECT_EQ(v(1, 0), 1.0f);
  EXPECT_EQ(v(1, 1), static_cast<float>('z'));
}

TEST(RemoteEmbeddings, CountMismatchRejected) {
  FakeEncoder enc(1);
  EXPECT_THROW(fetch_remote_embeddings(enc.endpoint(), {"a", "b"}), Error);
}

TEST(RemoteEmbeddings, UnreachableEndpointFailsAfterRetries) {
  int port;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  RemoteOptions opts;
  opts.retries = 1;
  opts.timeout = std::chrono::milliseconds(200);
  EXPECT_THROW(fetch_remote_embeddings("http://127.0.0.1:" + std::to_string(port), {"a"}, opts), Error);
}
