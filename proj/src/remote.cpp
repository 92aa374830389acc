#include "newsxlt/remote.hpp"

#include <httplib.h>
#include <json.hpp>

#include "newsxlt/error.hpp"

namespace newsxlt {

Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> fetch_remote_embeddings(
    const std::string& endpoint, const std::vector<std::string>& texts, const RemoteOptions& options) {
  using Matrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  httplib::Client client(endpoint);
  if (!client.is_valid()) throw Error("invalid embedding endpoint '" + endpoint + "'");
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const std::string body = nlohmann::json{{"texts", texts}}.dump();
  httplib::Result res;
  const int attempts = 1 + std::max(0, options.retries);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    res = client.Post("/embed", body, "application/json");
    if (res) break;
  }
  if (!res)
    throw Error("embedding endpoint " + endpoint + " unreachable after " + std::to_string(attempts) +
                " attempt(s): " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error("embedding endpoint returned HTTP " + std::to_string(res->status));

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed embedding response: ") + e.what());
  }
  if (!reply.is_object() || !reply.contains("vectors") || !reply["vectors"].is_array())
    throw Error("embedding response lacks a 'vectors' array");
  const auto& vectors = reply["vectors"];
  if (vectors.size() != texts.size())
    throw Error("embedding endpoint returned " + std::to_string(vectors.size()) + " vectors for " +
                std::to_string(texts.size()) + " texts");
  if (texts.empty()) return Matrix(0, 0);
  const std::size_t dim = vectors[0].is_array() ? vectors[0].size() : 0;
  if (dim == 0) throw Error("embedding response has an empty vector");
  Matrix out(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < vectors.size(); ++r) {
    const auto& v = vectors[r];
    if (!v.is_array() || v.size() != dim)
      throw Error("embedding response vector " + std::to_string(r) + " disagrees on dimension");
    for (std::size_t c = 0; c < dim; ++c) {
      if (!v[c].is_number()) throw Error("embedding response contains a non-numeric value");
      const float x = v[c].get<float>();
      if (!std::isfinite(x)) throw Error("embedding response contains a non-finite value");
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = x;
    }
  }
  return out;
}

}  // namespace newsxlt
