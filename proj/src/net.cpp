#include "vidiag/net.h"

#include "httplib.h"

namespace vidiag::net {

HttpReply post_json(const std::string& base_url, const std::string& path,
                    const std::string& body, int timeout_ms, int retries) {
  HttpReply reply;
  if (base_url.empty()) {
    reply.error = "no endpoint configured";
    return reply;
  }
  int attempts = retries < 0 ? 1 : retries + 1;
  for (int i = 0; i < attempts; ++i) {
    httplib::Client client(base_url);
    client.set_connection_timeout(0, timeout_ms * 1000);
    client.set_read_timeout(0, timeout_ms * 1000);
    client.set_write_timeout(0, timeout_ms * 1000);
    auto res = client.Post(path, body, "application/json");
    if (!res) {
      reply.error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    reply.status = res->status;
    reply.body = res->body;
    if (res->status >= 200 && res->status < 300) {
      reply.ok = true;
      reply.error.clear();
      return reply;
    }
    reply.error = "http status " + std::to_string(res->status);
  }
  return reply;
}

}  // namespace vidiag::net
