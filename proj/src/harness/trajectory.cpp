#include "opex/harness/trajectory.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "opex/common/hashing.hpp"

namespace opex::harness {

using nlohmann::json;

namespace {

// ordered_json keeps key order stable in the log.
using ojson = nlohmann::ordered_json;

ojson record_json(const TrajectoryRecord& r) {
    ojson j;
    j["type"] = r.type;
    j["t"] = r.t;
    j["digest"] = to_hex(r.digest);
    j["name"] = r.name;
    if (!r.target.empty()) j["target"] = r.target;
    j["success"] = r.success;
    if (!r.error.empty()) j["error"] = r.error;
    j["goal_seen"] = r.goal_seen;
    if (!r.detail.empty()) j["detail"] = r.detail;
    return j;
}

TrajectoryRecord record_from(const json& j) {
    TrajectoryRecord r;
    r.type = j.at("type").get<std::string>();
    r.t = j.value("t", 0);
    r.digest = std::stoull(j.value("digest", std::string("0")), nullptr, 16);
    r.name = j.value("name", "");
    r.target = j.value("target", "");
    r.success = j.value("success", true);
    r.error = j.value("error", "");
    r.goal_seen = j.value("goal_seen", false);
    r.detail = j.value("detail", "");
    return r;
}

}  // namespace

void write_jsonl(std::ostream& out, const Trajectory& t) {
    ojson header;
    header["type"] = "header";
    header["episode"] = t.episode;
    header["config"] = ojson::parse(t.config.dump());
    header["goal_classes"] = t.goal_classes;
    header["closed_goal_containers"] = t.closed_goal_containers;
    header["expert_length"] = t.expert_length ? ojson(*t.expert_length) : ojson(nullptr);
    out << header.dump() << '\n';
    for (const auto& r : t.records) out << record_json(r).dump() << '\n';
    ojson result;
    result["type"] = "result";
    result["episode"] = t.episode;
    result["success"] = t.goal.success;
    result["satisfied"] = t.goal.satisfied;
    result["total"] = t.goal.total;
    result["agent_length"] = t.agent_length;
    result["termination"] = t.termination;
    result["parse_failures"] = t.parse_failures;
    out << result.dump() << '\n';
}

std::string to_jsonl(const Trajectory& t) {
    std::ostringstream ss;
    write_jsonl(ss, t);
    return ss.str();
}

std::vector<Trajectory> read_jsonl(std::istream& in) {
    std::vector<Trajectory> out;
    std::optional<Trajectory> cur;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error("trajectory log line " + std::to_string(lineno) + ": " + e.what());
        }
        const std::string type = j.value("type", "");
        if (type == "header") {
            if (cur) throw std::runtime_error("trajectory log line " + std::to_string(lineno) + ": header before result");
            cur = Trajectory{};
            cur->episode = j.value("episode", "");
            cur->config = j.value("config", json::object());
            cur->goal_classes = j.value("goal_classes", std::vector<std::string>{});
            cur->closed_goal_containers = j.value("closed_goal_containers", std::vector<std::string>{});
            if (j.contains("expert_length") && !j["expert_length"].is_null()) cur->expert_length = j["expert_length"].get<int>();
        } else if (type == "result") {
            if (!cur) throw std::runtime_error("trajectory log line " + std::to_string(lineno) + ": result without header");
            cur->goal.success = j.value("success", false);
            cur->goal.satisfied = j.value("satisfied", 0);
            cur->goal.total = j.value("total", 0);
            cur->agent_length = j.value("agent_length", 0);
            cur->termination = j.value("termination", "");
            cur->parse_failures = j.value("parse_failures", 0);
            out.push_back(std::move(*cur));
            cur.reset();
        } else {
            if (!cur) throw std::runtime_error("trajectory log line " + std::to_string(lineno) + ": record outside an episode");
            cur->records.push_back(record_from(j));
        }
    }
    if (cur) throw std::runtime_error("trajectory log ends inside episode " + cur->episode);
    return out;
}

}  // namespace opex::harness
