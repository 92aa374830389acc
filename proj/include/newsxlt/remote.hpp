#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <string>
#include <vector>

namespace newsxlt {

struct RemoteOptions {
  int retries = 2;  // extra attempts after the first transport failure
  std::chrono::milliseconds timeout{5000};
};

/// POSTs {"texts": [...]} to <endpoint>/embed and returns one row per text.
/// `endpoint` is a base URL such as "http://localhost:8080". Throws Error on
/// transport failure (after retries), a non-200 status, a malformed body, a
/// vector count that differs from the text count, or ragged dimensions.
Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> fetch_remote_embeddings(
    const std::string& endpoint, const std::vector<std::string>& texts, const RemoteOptions& options = {});

}  // namespace newsxlt
