#pragma once

#include <string>
#include <utility>
#include <vector>

namespace paraeval::http {

struct Response {
  int status = 0;
  std::string body;
};

/// POSTs a JSON body. Transport failures throw an external error; any HTTP
/// status is returned to the caller.
Response post_json(const std::string& url, const std::string& body,
                   const std::vector<std::pair<std::string, std::string>>& headers,
                   int timeout_seconds);

}  // namespace paraeval::http
