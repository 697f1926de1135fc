#include "opex/common/http.hpp"

#include <httplib.h>

#include <cstdlib>

namespace opex::http {

std::string post_json(const Endpoint& ep, const std::string& body, const std::map<std::string, std::string>& headers) {
    httplib::Client client(ep.base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(ep.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(ep.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);

    std::string last = "no attempt made";
    const int attempts = std::max(1, ep.attempts);
    for (int i = 0; i < attempts; ++i) {
        auto res = client.Post(ep.path, h, body, "application/json");
        if (!res) {
            last = ep.base_url + ep.path + ": " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last = ep.base_url + ep.path + ": HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status >= 400)
            throw RemoteError(ep.base_url + ep.path + ": HTTP " + std::to_string(res->status) + ": " + res->body, i + 1);
        return res->body;
    }
    throw RemoteError(last, attempts);
}

std::string env_credential(const std::string& variable) {
    const char* v = std::getenv(variable.c_str());
    if (!v || !*v) throw std::runtime_error("environment variable " + variable + " is not set");
    return v;
}

}  // namespace opex::http
