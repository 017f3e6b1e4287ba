#pragma once

#include <string>

namespace vidiag::net {

struct HttpReply {
  bool ok = false;
  int status = 0;
  std::string body;
  std::string error;  // transport-level failure description
};

/// POSTs a JSON body to base_url + path with a bounded number of retries.
/// Transport failures and non-2xx statuses surface as ok == false.
HttpReply post_json(const std::string& base_url, const std::string& path,
                    const std::string& body, int timeout_ms, int retries);

}  // namespace vidiag::net
