#pragma once

#include <chrono>
#include <map>
#include <stdexcept>
#include <string>

namespace opex::http {

class RemoteError : public std::runtime_error {
public:
    RemoteError(const std::string& what, int attempts)
        : std::runtime_error(what + " (after " + std::to_string(attempts) + " attempts)"), attempts_(attempts) {}
    int attempts() const { return attempts_; }

private:
    int attempts_;
};

struct Endpoint {
    std::string base_url;  // scheme://host[:port]
    std::string path;
    std::chrono::milliseconds timeout{30000};
    int attempts = 3;
};

// POSTs a JSON body and returns the response body. Retries on transport errors and 5xx.
std::string post_json(const Endpoint& ep, const std::string& body, const std::map<std::string, std::string>& headers);

// Reads a credential from the environment; throws when unset or empty.
std::string env_credential(const std::string& variable);

}  // namespace opex::http
