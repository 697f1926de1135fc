#include "opex/harness/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "opex/knowledge/knowledge.hpp"
#include "opex/roles/agent.hpp"
#include "opex/roles/oracle.hpp"
#include "opex/selector/selector.hpp"
#include "opex/sim/expert.hpp"

namespace opex::harness {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(BackendChoice b) {
    switch (b) {
        case BackendChoice::Oracle: return "oracle";
        case BackendChoice::Scripted: return "scripted";
        case BackendChoice::Remote: return "remote";
    }
    return "oracle";
}

BackendChoice parse_backend(const std::string& s) {
    if (s == "oracle") return BackendChoice::Oracle;
    if (s == "scripted") return BackendChoice::Scripted;
    if (s == "remote") return BackendChoice::Remote;
    throw ConfigError("unknown backend '" + s + "' (expected oracle, scripted or remote)");
}

std::vector<std::string> ablation_names() { return {"m-prime", "planner", "observer", "slice-replay", "traversable-goal"}; }

void disable(Ablations& a, const std::string& name) {
    if (name == "m-prime") a.m_prime = false;
    else if (name == "planner") a.planner = false;
    else if (name == "observer") a.observer = false;
    else if (name == "slice-replay") a.slice_replay = false;
    else if (name == "traversable-goal") a.traversable_goal = false;
    else throw ConfigError("unknown ablation '" + name + "'");
}

namespace {

json disabled_list(const Ablations& a) {
    json out = json::array();
    if (!a.m_prime) out.push_back("m-prime");
    if (!a.planner) out.push_back("planner");
    if (!a.observer) out.push_back("observer");
    if (!a.slice_replay) out.push_back("slice-replay");
    if (!a.traversable_goal) out.push_back("traversable-goal");
    return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return {};
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

json config_json(const EpisodeConfig& c) {
    json j;
    j["scenario"] = c.scenario ? c.scenario->name : c.scenario_path.stem().string();
    j["mode"] = c.mode == EpisodeMode::Agent ? "agent" : "dialogue";
    j["backend"] = to_string(c.backend);
    j["noise"] = c.noise ? json(*c.noise) : json();
    j["seed"] = c.seed ? json(*c.seed) : json();
    j["ablate"] = disabled_list(c.ablate);
    j["pool"] = c.pool.empty() ? json() : json(c.pool.filename().string());
    j["k"] = c.k;
    if (c.backend == BackendChoice::Remote) j["remote"] = {{"base_url", c.remote.base_url}, {"model", c.remote.model}};
    if (c.mode == EpisodeMode::Dialogue) {
        j["knowledge"] = c.knowledge.empty() ? json() : json(c.knowledge.filename().string());
        j["turn_cap"] = c.turn_cap;
    }
    return j;
}

EpisodeConfig config_from_json(const json& doc, const fs::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("episode config must be an object");
    static const std::vector<std::string> known = {"scenario", "mode",  "backend",       "transcript", "remote",
                                                   "noise",    "seed",  "ablate",        "pool",       "k",
                                                   "expert_length", "knowledge", "turn_cap"};
    for (const auto& [key, _] : doc.items())
        if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");
    EpisodeConfig c;
    try {
        c.scenario_path = resolve(base_dir, doc.value("scenario", std::string()));
        const std::string mode = doc.value("mode", std::string("agent"));
        if (mode != "agent" && mode != "dialogue") throw ConfigError("mode must be agent or dialogue, got " + mode);
        c.mode = mode == "agent" ? EpisodeMode::Agent : EpisodeMode::Dialogue;
        c.backend = parse_backend(doc.value("backend", std::string("oracle")));
        c.transcript = resolve(base_dir, doc.value("transcript", std::string()));
        if (doc.contains("remote")) {
            const auto& r = doc["remote"];
            c.remote.base_url = r.value("base_url", c.remote.base_url);
            c.remote.path = r.value("path", c.remote.path);
            c.remote.model = r.value("model", c.remote.model);
            c.remote.api_key_env = r.value("api_key_env", c.remote.api_key_env);
            c.remote.timeout_ms = r.value("timeout_ms", c.remote.timeout_ms);
            c.remote.attempts = r.value("attempts", c.remote.attempts);
        }
        if (doc.contains("noise") && !doc["noise"].is_null()) c.noise = doc["noise"].get<double>();
        if (doc.contains("seed") && !doc["seed"].is_null()) c.seed = doc["seed"].get<std::uint64_t>();
        for (const auto& a : doc.value("ablate", json::array())) disable(c.ablate, a.get<std::string>());
        c.pool = resolve(base_dir, doc.value("pool", std::string()));
        c.k = doc.value("k", 3);
        if (doc.contains("expert_length") && !doc["expert_length"].is_null()) c.expert_length = doc["expert_length"].get<int>();
        c.knowledge = resolve(base_dir, doc.value("knowledge", std::string()));
        c.turn_cap = doc.value("turn_cap", 30);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad episode config: ") + e.what());
    }
    if (c.noise && (*c.noise < 0 || *c.noise > 1)) throw ConfigError("noise must lie in [0, 1]");
    if (c.k < 1) throw ConfigError("k must be at least 1");
    if (c.turn_cap < 1) throw ConfigError("turn_cap must be at least 1");
    return c;
}

std::map<sim::ClassId, std::vector<sim::ClassId>> default_confusion() {
    static const std::vector<std::pair<const char*, const char*>> pairs = {
        {"Mug", "Cup"},       {"Apple", "Tomato"},        {"Knife", "ButterKnife"}, {"Bowl", "Plate"},
        {"Pot", "Pan"},       {"Spoon", "Fork"},          {"Egg", "Potato"},        {"CellPhone", "CreditCard"},
        {"KeyChain", "Watch"}, {"Vase", "Candle"},        {"SoapBar", "Sponge"},    {"Bread", "Lettuce"},
        {"Book", "Pencil"},
    };
    std::map<sim::ClassId, std::vector<sim::ClassId>> out;
    for (const auto& [a, b] : pairs) {
        const auto x = sim::find_class(a);
        const auto y = sim::find_class(b);
        if (!x || !y) continue;
        out[*x].push_back(*y);
        out[*y].push_back(*x);
    }
    return out;
}

namespace {

sim::Scenario prepare_scenario(const EpisodeConfig& cfg) {
    sim::Scenario sc;
    if (cfg.scenario) {
        sc = *cfg.scenario;
    } else {
        if (cfg.scenario_path.empty()) throw ConfigError("no scenario given");
        try {
            sc = sim::load_scenario_file(cfg.scenario_path);
        } catch (const std::exception& e) {
            throw ConfigError("scenario " + cfg.scenario_path.string() + ": " + e.what());
        }
    }
    if (cfg.noise) {
        sc.noise.mislabel = *cfg.noise;
        if (sc.noise.confusion.empty()) sc.noise.confusion = default_confusion();
    }
    if (cfg.seed) sc.seed = *cfg.seed;
    return sc;
}

std::vector<roles::TranscriptEntry> transcript_list(const json& doc, const std::string& role) {
    std::vector<roles::TranscriptEntry> out;
    if (!doc.contains(role)) return out;
    for (const auto& e : doc.at(role)) {
        roles::TranscriptEntry t;
        if (e.contains("prompt_digest") && !e["prompt_digest"].is_null()) t.prompt_digest = e["prompt_digest"].get<std::string>();
        t.completion = e.at("completion").get<std::string>();
        out.push_back(std::move(t));
    }
    return out;
}

json load_transcript(const fs::path& p) {
    if (p.empty()) throw ConfigError("scripted backend needs a transcript file");
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot open transcript " + p.string());
    try {
        json doc;
        in >> doc;
        if (!doc.is_object()) throw ConfigError("transcript " + p.string() + " must be an object keyed by role");
        return doc;
    } catch (const json::exception& e) {
        throw ConfigError("transcript " + p.string() + ": " + e.what());
    }
}

std::vector<std::string> planner_examples(const EpisodeConfig& cfg, const sim::Scenario& sc) {
    if (cfg.pool.empty()) return {};
    selector::HashEmbedding hash;
    selector::ExamplePool pool;
    try {
        pool = selector::ExamplePool::load(cfg.pool, &hash);
    } catch (const std::exception& e) {
        throw ConfigError("example pool " + cfg.pool.string() + ": " + e.what());
    }
    std::vector<std::string> out;
    for (const auto& r : selector::select_top_k(sc.task.high_level, pool, static_cast<std::size_t>(cfg.k), hash))
        out.push_back(pool.entries[r.index].example);
    return out;
}

// Fail before the episode when the key is missing.
void require_credential(const roles::RemoteConfig& r) {
    try {
        http::env_credential(r.api_key_env);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("remote backend: ") + e.what());
    }
}

double candidate_precision(const std::optional<perception::LocateResult>& q, const sim::WorldState& s, sim::ClassId goal) {
    if (!q || q->candidates.empty()) return 0.0;
    int hits = 0;
    for (const auto& c : q->candidates) {
        const auto i = s.find(c.handle);
        if (i && s.info(*i).cls == goal) ++hits;
    }
    return static_cast<double>(hits) / q->candidates.size();
}

EpisodeResult run_agent_episode(const EpisodeConfig& cfg, const sim::Scenario& sc) {
    json transcript;
    if (cfg.backend == BackendChoice::Scripted) transcript = load_transcript(cfg.transcript);
    const auto examples = planner_examples(cfg, sc);

    std::unique_ptr<roles::CompletionBackend> planner, observer, executor;
    switch (cfg.backend) {
        case BackendChoice::Oracle:
            planner = std::make_unique<roles::RuleOraclePlanner>(sc.task.type, sc.goals.targets);
            observer = std::make_unique<roles::RuleOracleObserver>();
            executor = std::make_unique<roles::RuleOracleExecutor>();
            break;
        case BackendChoice::Scripted:
            planner = std::make_unique<roles::ScriptedBackend>(transcript_list(transcript, "planner"));
            if (transcript.contains("observer"))
                observer = std::make_unique<roles::ScriptedBackend>(transcript_list(transcript, "observer"));
            executor = std::make_unique<roles::ScriptedBackend>(transcript_list(transcript, "executor"));
            break;
        case BackendChoice::Remote:
            require_credential(cfg.remote);
            planner = std::make_unique<roles::RemoteBackend>(cfg.remote);
            observer = std::make_unique<roles::RemoteBackend>(cfg.remote);
            executor = std::make_unique<roles::RemoteBackend>(cfg.remote);
            break;
    }
    if (!cfg.ablate.observer) observer.reset();

    nav::PolicyConfig pc;
    pc.use_mprime = cfg.ablate.m_prime;
    pc.traversable_goal = cfg.ablate.traversable_goal;
    pc.slice_replay = cfg.ablate.slice_replay;
    pc.seed = sc.seed;

    sim::Simulator s(sc);
    skills::AgentContext ctx(s, pc);
    EpisodeResult out;
    const auto goal = sim::find_class(sc.goals.targets.object);
    if (goal) {
        ctx.on_step = [&](const skills::StepEvent&) {
            const auto cascaded = ctx.maps.locate(*goal, true);
            const auto m_only = ctx.maps.locate(*goal, false);
            if (!cascaded && !m_only) return;
            out.localization.cascaded_sum += candidate_precision(cascaded, s.state(), *goal);
            out.localization.m_only_sum += candidate_precision(m_only, s.state(), *goal);
            ++out.localization.queries;
        };
    }
    roles::AgentConfig ac;
    ac.use_planner = cfg.ablate.planner;
    ac.examples = examples;
    out.trajectory = roles::run_agent(ctx, {planner.get(), observer.get(), executor.get()}, ac);
    return out;
}

EpisodeResult run_dialogue_episode(const EpisodeConfig& cfg, const sim::Scenario& sc) {
    std::vector<knowledge::KnowledgeItem> facts;
    if (!cfg.knowledge.empty()) {
        try {
            facts = knowledge::load_knowledge(cfg.knowledge);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    }
    std::unique_ptr<roles::CompletionBackend> reasoner, actor;
    switch (cfg.backend) {
        case BackendChoice::Oracle:
            reasoner = std::make_unique<knowledge::RuleReasoner>(sc);
            actor = std::make_unique<knowledge::RuleActor>();
            break;
        case BackendChoice::Scripted: {
            const json t = load_transcript(cfg.transcript);
            reasoner = std::make_unique<roles::ScriptedBackend>(transcript_list(t, "reasoner"));
            actor = std::make_unique<roles::ScriptedBackend>(transcript_list(t, "actor"));
            break;
        }
        case BackendChoice::Remote:
            require_credential(cfg.remote);
            reasoner = std::make_unique<roles::RemoteBackend>(cfg.remote);
            actor = std::make_unique<roles::RemoteBackend>(cfg.remote);
            break;
    }
    EpisodeResult out;
    out.trajectory = knowledge::run_dialogue(sc, facts, *reasoner, *actor, cfg.turn_cap).trajectory;
    return out;
}

}  // namespace

EpisodeResult run_episode_full(const EpisodeConfig& cfg) {
    const sim::Scenario sc = prepare_scenario(cfg);
    std::optional<int> expert = cfg.expert_length;
    if (!expert) {
        if (cfg.mode == EpisodeMode::Dialogue) {
            // Text-world commands of the informed scripted plan.
            expert = static_cast<int>(knowledge::RuleReasoner(sc).command_plan(true).size());
        } else {
            try {
                expert = sim::expert_path_length(sc);
            } catch (const sim::ExpertError&) {
                // Left unset; metrics will name the episode.
            }
        }
    }
    EpisodeResult r = cfg.mode == EpisodeMode::Agent ? run_agent_episode(cfg, sc) : run_dialogue_episode(cfg, sc);
    auto& t = r.trajectory;
    t.episode = sc.name;
    t.config = config_json(cfg);
    t.config["scenario"] = sc.name;
    t.config["seed"] = sc.seed;
    t.expert_length = expert;
    return r;
}

Trajectory run_episode(const EpisodeConfig& cfg) { return run_episode_full(cfg).trajectory; }

std::vector<EpisodeConfig> load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("manifest " + path.string() + ": " + e.what());
    }
    const json defaults = doc.value("defaults", json::object());
    const json episodes = doc.value("episodes", json::array());
    if (!episodes.is_array() || episodes.empty()) throw ConfigError("manifest " + path.string() + " has no episodes");
    std::vector<EpisodeConfig> out;
    for (const auto& e : episodes) {
        json merged = defaults;
        if (e.is_string()) merged["scenario"] = e;
        else merged.update(e);
        out.push_back(config_from_json(merged, path.parent_path()));
    }
    return out;
}

SuiteResult run_suite(const std::vector<EpisodeConfig>& episodes, int jobs) {
    if (episodes.empty()) throw ConfigError("suite has no episodes");
    // Load every scenario up front so a broken file aborts before anything runs.
    std::vector<EpisodeConfig> cfgs = episodes;
    for (auto& c : cfgs) {
        if (c.scenario) continue;
        try {
            c.scenario = sim::load_scenario_file(c.scenario_path);
        } catch (const std::exception& e) {
            throw ConfigError("scenario " + c.scenario_path.string() + ": " + e.what());
        }
    }

    std::vector<EpisodeResult> results(cfgs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < cfgs.size();) {
            try {
                results[i] = run_episode_full(cfgs[i]);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(cfgs.size())));
    std::vector<std::thread> pool;
    for (int j = 1; j < n; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    SuiteResult out;
    for (auto& r : results) {
        out.localization.add(r.localization);
        out.parse_failures += r.trajectory.parse_failures;
        out.trajectories.push_back(std::move(r.trajectory));
    }
    out.metrics = compute_metrics(out.trajectories);
    out.errors = error_histogram(out.trajectories);
    return out;
}

namespace {

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

std::string results_csv(const SuiteResult& r) {
    std::ostringstream out;
    out << "episode,success,GC,L*,L̂,w,error_mode\n";
    for (std::size_t i = 0; i < r.trajectories.size(); ++i) {
        const auto& t = r.trajectories[i];
        const auto& e = r.metrics.episodes[i];
        out << t.episode << ',' << (e.success ? 1 : 0) << ',' << fixed(e.gc) << ',' << e.expert_length << ','
            << e.agent_length << ',' << fixed(e.weight) << ',' << (e.success ? "" : to_string(classify_error(t))) << '\n';
    }
    return out.str();
}

json summary_json(const SuiteResult& r) {
    json j;
    j["episodes"] = r.trajectories.size();
    j["SR"] = 100.0 * r.metrics.sr;
    j["GC"] = 100.0 * r.metrics.gc;
    j["PLWSR"] = 100.0 * r.metrics.plwsr;
    j["PLWGC"] = 100.0 * r.metrics.plwgc;
    json modes = json::object();
    for (const auto& [m, n] : r.errors) modes[to_string(m)] = n;
    j["error_modes"] = modes;
    j["parse_failures"] = r.parse_failures;
    j["localization"] = {{"cascaded", r.localization.cascaded()},
                         {"m_only", r.localization.m_only()},
                         {"queries", r.localization.queries}};
    return j;
}

}  // namespace opex::harness
