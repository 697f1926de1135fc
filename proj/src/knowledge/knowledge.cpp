#include "opex/knowledge/knowledge.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <stdexcept>

#include "opex/common/hashing.hpp"
#include "opex/common/text.hpp"
#include "opex/roles/agent.hpp"
#include "opex/skills/skills.hpp"

namespace opex::knowledge {

using nlohmann::json;

std::string to_string(Source s) { return s == Source::Human ? "human" : "learned"; }

std::string to_string(const Triple& t) { return t.subject + " " + t.relation + " " + (t.polarity ? "+" : "-"); }

namespace {

std::vector<sim::ClassId> mentioned(const std::string& sentence) {
    std::vector<std::string> words;
    for (auto w : text::split(text::to_lower(sentence), ' ')) {
        while (!w.empty() && !std::isalnum(static_cast<unsigned char>(w.back()))) w.pop_back();
        while (!w.empty() && !std::isalnum(static_cast<unsigned char>(w.front()))) w.erase(w.begin());
        if (!w.empty()) words.push_back(w);
    }
    std::vector<sim::ClassId> out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i + 1 < words.size())
            if (auto c = skills::resolve_class(words[i] + " " + words[i + 1])) {
                out.push_back(*c);
                ++i;
                continue;
            }
        if (auto c = skills::resolve_class(words[i])) out.push_back(*c);
    }
    return out;
}

bool has(const std::string& s, const char* pattern) { return std::regex_search(s, std::regex(pattern)); }

std::string subject_name(sim::ClassId c) { return text::to_lower(sim::class_name(c)); }

// "sinkbasin 1" -> "sinkbasin"
std::string class_of_name(const std::string& name) {
    std::string s = text::trim(name);
    while (!s.empty() && (std::isdigit(static_cast<unsigned char>(s.back())) || s.back() == ' ')) s.pop_back();
    return s;
}

}  // namespace

std::optional<Triple> normalize_statement(const std::string& statement) {
    const std::string l = text::to_lower(statement);
    const bool neg = has(l, R"(\b(cannot|can't|can not|not|only|never|unable|no more than)\b)");
    if (has(l, R"(\b(hold|holds|holding|carry|carrying)\b)") &&
        has(l, R"((more than one|one object|one item|one thing|two|multiple|several|at a time|at once))"))
        return Triple{"agent", "hold-multiple", !neg};

    const auto classes = mentioned(l);
    const auto pick = [&](auto pred) -> std::optional<std::string> {
        for (auto it = classes.rbegin(); it != classes.rend(); ++it)
            if (pred(sim::traits(*it))) return subject_name(*it);
        return std::nullopt;
    };
    const auto fixture_like = [](const sim::ClassTraits& t) { return t.receptacle || t.toggleable; };
    if (has(l, R"(\b(clean|cleaned|cleans|wash|washed|washes|rinse)\b)"))
        if (auto s = pick(fixture_like)) return Triple{*s, "cleans-in", !neg};
    if (has(l, R"(\b(heat|heated|heats|warm|warmed|hot)\b)"))
        if (auto s = pick(fixture_like)) return Triple{*s, "heats-in", !neg};
    if (has(l, R"(\b(cool|cooled|cools|chill|chilled|cold)\b)"))
        if (auto s = pick(fixture_like)) return Triple{*s, "cools-in", !neg};
    if (has(l, R"(\b(open|opened|opening)\b)") && has(l, R"(\b(before|first|must|need|needs)\b)"))
        if (auto s = pick([](const sim::ClassTraits& t) { return t.openable; })) return Triple{*s, "opens-before-access", !neg};
    if (has(l, R"(\b(light|lamp)\b)") && has(l, R"(\b(use|turn on|switch on|examine|look)\b)"))
        if (auto s = pick([](const sim::ClassTraits& t) { return t.light_source; })) return Triple{*s, "lights-with", !neg};
    return std::nullopt;
}

std::string statement_for(const Triple& t) {
    const std::string& s = t.subject;
    if (t.relation == "hold-multiple")
        return t.polarity ? "The agent can hold more than one object at a time."
                          : "The agent cannot hold more than one object at a time.";
    if (t.relation == "cleans-in")
        return t.polarity ? "Objects can be cleaned with the " + s + "." : "Objects cannot be cleaned with the " + s + ".";
    if (t.relation == "heats-in")
        return t.polarity ? "Objects can be heated with the " + s + "." : "Objects cannot be heated with the " + s + ".";
    if (t.relation == "cools-in")
        return t.polarity ? "Objects can be cooled with the " + s + "." : "Objects cannot be cooled with the " + s + ".";
    if (t.relation == "opens-before-access")
        return t.polarity ? "The " + s + " must be opened before taking or putting objects in it."
                          : "The " + s + " does not need to be opened before taking or putting objects in it.";
    if (t.relation == "lights-with")
        return t.polarity ? "Use the " + s + " to examine objects in its light."
                          : "The " + s + " cannot be used to examine objects in light.";
    throw std::invalid_argument("unknown relation " + t.relation);
}

json knowledge_json(const std::vector<KnowledgeItem>& items) {
    json doc = json::array();
    for (const auto& k : items)
        doc.push_back({{"statement", k.statement},
                       {"triple", {{"subject", k.triple.subject}, {"relation", k.triple.relation}, {"polarity", k.triple.polarity}}},
                       {"support", k.support},
                       {"source", to_string(k.source)}});
    return doc;
}

std::vector<KnowledgeItem> knowledge_from_json(const json& doc) {
    std::vector<KnowledgeItem> out;
    for (const auto& e : doc) {
        KnowledgeItem k;
        k.statement = e.at("statement").get<std::string>();
        const std::string src = e.value("source", "learned");
        if (src != "learned" && src != "human") throw std::runtime_error("knowledge source must be learned or human, got " + src);
        k.source = src == "human" ? Source::Human : Source::Learned;
        if (e.contains("triple")) {
            const auto& t = e["triple"];
            k.triple = {t.at("subject").get<std::string>(), t.at("relation").get<std::string>(), t.at("polarity").get<bool>()};
        } else if (auto t = normalize_statement(k.statement)) {
            k.triple = *t;
        } else {
            throw std::runtime_error("knowledge statement cannot be normalized: " + k.statement);
        }
        k.support = e.value("support", 1);
        if (k.source == Source::Learned && k.support < 1) throw std::runtime_error("learned knowledge needs support >= 1: " + k.statement);
        out.push_back(std::move(k));
    }
    return out;
}

std::vector<KnowledgeItem> load_knowledge(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open knowledge file " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("knowledge file " + path.string() + ": " + e.what());
    }
    return knowledge_from_json(doc);
}

void save_knowledge(const std::filesystem::path& path, const std::vector<KnowledgeItem>& items) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write knowledge file " + path.string());
    out << knowledge_json(items).dump(2) << '\n';
}

json log_json(const ExplorationLog& log) {
    json doc = json::array();
    for (const auto& s : log.sequences) doc.push_back({{"episode", s.episode}, {"observations", s.observations}, {"actions", s.actions}});
    return doc;
}

ExplorationLog log_from_json(const json& doc) {
    ExplorationLog log;
    for (const auto& e : doc) {
        AOSequence s;
        s.episode = e.at("episode").get<std::string>();
        s.observations = e.at("observations").get<std::vector<std::string>>();
        s.actions = e.at("actions").get<std::vector<std::string>>();
        if (s.observations.size() != s.actions.size() + 1)
            throw std::runtime_error("sequence " + s.episode + " does not alternate observations and actions");
        log.sequences.push_back(std::move(s));
    }
    return log;
}

ExplorationLog explore_collect(const std::vector<sim::Scenario>& envs, const ExplorerFactory& explorer, int budget,
                               std::uint64_t seed, int max_actions) {
    if (budget < 1) throw std::invalid_argument("exploration budget must be at least 1");
    if (envs.empty()) throw std::invalid_argument("no scenarios to explore");
    ExplorationLog log;
    for (int ep = 0; ep < budget; ++ep) {
        const auto& sc = envs[static_cast<std::size_t>(ep) % envs.size()];
        TextEnv env(sc);
        auto policy = explorer(sc, mix64(seed, static_cast<std::uint64_t>(ep)));
        AOSequence seq;
        seq.episode = sc.name + "#" + std::to_string(ep);
        seq.observations.push_back(env.reset());
        for (int t = 0; t < max_actions && !env.success(); ++t) {
            const std::string action = text::trim(policy->complete("Observation: " + seq.observations.back() + "\nAction:"));
            if (text::iequals(action, "finish")) break;
            seq.actions.push_back(action);
            seq.observations.push_back(env.step(action));
        }
        log.sequences.push_back(std::move(seq));
    }
    return log;
}

namespace {

// "you see a mug 1, a cup 2, and a knife 1." -> names
std::vector<std::string> seen_names(const std::string& obs) {
    std::vector<std::string> out;
    const auto p = obs.find("you see ");
    if (p == std::string::npos) return out;
    std::string rest = obs.substr(p + 8);
    rest = rest.substr(0, rest.find('.'));
    if (rest == "nothing") return out;
    static const std::regex item(R"((?:^|,\s*|\s+and\s+|,\s*and\s+)an?\s+([a-z]+ \d+))");
    for (std::sregex_iterator it(rest.begin(), rest.end(), item), end; it != end; ++it) out.push_back((*it)[1].str());
    return out;
}

}  // namespace

std::string RuleExplorer::complete(const std::string& prompt) {
    std::string obs = prompt;
    if (const auto p = obs.find("Observation: "); p != std::string::npos) obs = obs.substr(p + 13);
    if (const auto p = obs.find("\nAction:"); p != std::string::npos) obs = obs.substr(0, p);

    if (!started_) {
        started_ = true;
        queue_ = seen_names(obs.substr(0, obs.find('\n')));
        for (std::size_t i = queue_.size(); i > 1; --i)
            std::swap(queue_[i - 1], queue_[mix64(seed_, i) % i]);
    }
    static const std::regex picked(R"(^You pick up the ([a-z]+ \d+) from)");
    static const std::regex arrived(R"(^You arrive at ([a-z]+ \d+)\.)");
    std::smatch m;
    if (last_.rfind("take ", 0) == 0 && obs == kNothingHappens) take_failed_ = true;
    if (std::regex_search(obs, m, picked)) held_ = m[1].str();
    if (obs.rfind("You put the ", 0) == 0) held_.reset();
    if (std::regex_search(obs, m, arrived) || obs.rfind("You open the ", 0) == 0) {
        if (std::regex_search(obs, m, arrived)) here_ = m[1].str();
        pending_.clear();
        take_failed_ = false;
        const auto traits_of = [](const std::string& n) -> const sim::ClassTraits* {
            const auto c = skills::resolve_class(class_of_name(n));
            return c ? &sim::traits(*c) : nullptr;
        };
        const auto* here = traits_of(here_);
        if (obs.find(" is closed.") != std::string::npos) {
            // Try the closed receptacle once before opening it.
            if (held_) pending_.push_back("put " + *held_ + " in " + here_);
            pending_.push_back("open " + here_);
        } else {
            if (held_ && here) {
                if (class_of_name(here_) == "sinkbasin") pending_.push_back("clean " + *held_ + " with " + here_);
                if (here->heats_contents) pending_.push_back("heat " + *held_ + " with " + here_);
                if (here->cools_contents) pending_.push_back("cool " + *held_ + " with " + here_);
            }
            if (here && here->light_source) pending_.push_back("use " + here_);
            const auto items = seen_names(obs);
            for (const auto& n : items)
                if (const auto* t = traits_of(n); t && t->light_source) pending_.push_back("use " + n);
            for (const auto& n : items)
                if (const auto* t = traits_of(n); t && t->pickupable) pending_.push_back("take " + n + " from " + here_);
            if (here && here->receptacle) pending_.push_back("@put");  // resolved when reached: put down whatever is held
        }
    }
    last_ = next_command();
    return last_;
}

std::string RuleExplorer::next_command() {
    while (!pending_.empty()) {
        std::string next = pending_.front();
        pending_.erase(pending_.begin());
        if (next == "@put") {
            if (held_ && take_failed_) return "put " + *held_ + " in " + here_;
            continue;
        }
        return next;
    }
    if (queue_.empty()) return "finish";
    const std::string target = queue_.front();
    queue_.erase(queue_.begin());
    return "go to " + target;
}

SummaryResult summarize_rules(const ExplorationLog& log, int threshold) {
    if (log.sequences.empty()) throw std::invalid_argument("exploration log is empty");
    std::map<Triple, std::set<std::string>> evidence;
    static const std::regex picked(R"(^You pick up the ([a-z]+ \d+) from)");
    static const std::regex arrive_closed(R"(^You arrive at ([a-z]+ \d+)\. The [a-z]+ \d+ is closed\.)");
    static const std::regex opened(R"(^You open the ([a-z]+ \d+)\.)");
    static const std::regex take_put(R"(^(?:take|put) [a-z]+ \d+ (?:from|in|on|in/on) ([a-z]+ \d+)$)");
    static const std::regex tool(R"(^(clean|heat|cool) [a-z]+ \d+ with ([a-z]+ \d+)$)");
    static const std::regex use(R"(^use ([a-z]+ \d+)$)");
    for (const auto& seq : log.sequences) {
        bool holding = false;
        std::set<std::string> closed;
        for (std::size_t i = 0; i < seq.actions.size(); ++i) {
            const std::string a = text::to_lower(text::trim(seq.actions[i]));
            const std::string& obs = seq.observations[i + 1];
            const bool failed = obs == kNothingHappens;
            std::smatch m;
            if (failed) {
                if (a.rfind("take ", 0) == 0 && holding) evidence[{"agent", "hold-multiple", false}].insert(seq.episode);
                if (std::regex_match(a, m, take_put) && closed.count(m[1].str()))
                    evidence[{class_of_name(m[1].str()), "opens-before-access", true}].insert(seq.episode);
            } else {
                if (std::regex_match(a, m, tool)) {
                    const std::string verb = m[1].str();
                    const std::string rel = verb == "clean" ? "cleans-in" : verb == "heat" ? "heats-in" : "cools-in";
                    evidence[{class_of_name(m[2].str()), rel, true}].insert(seq.episode);
                }
                if (std::regex_match(a, m, use)) evidence[{class_of_name(m[1].str()), "lights-with", true}].insert(seq.episode);
            }
            std::smatch o;
            if (std::regex_search(obs, o, picked)) holding = true;
            if (obs.rfind("You put the ", 0) == 0) holding = false;
            if (std::regex_search(obs, o, arrive_closed)) closed.insert(o[1].str());
            if (std::regex_search(obs, o, opened)) closed.erase(o[1].str());
        }
    }
    SummaryResult r;
    for (const auto& [t, eps] : evidence) {
        if (static_cast<int>(eps.size()) < threshold) continue;
        r.candidates.push_back({statement_for(t), t, static_cast<int>(eps.size()), Source::Learned});
    }
    return r;
}

SummaryResult summarize_with(const ExplorationLog& log, roles::CompletionBackend& backend) {
    if (log.sequences.empty()) throw std::invalid_argument("exploration log is empty");
    std::string prompt =
        "Below are action and observation sequences from episodes in a household text world. Summarize the general "
        "rules of this world you can learn from them, one short statement per line.\n";
    for (const auto& s : log.sequences) {
        prompt += "\nEpisode " + s.episode + ":\n";
        for (std::size_t i = 0; i < s.observations.size(); ++i) {
            prompt += "Observation: " + s.observations[i] + "\n";
            if (i < s.actions.size()) prompt += "Action: " + s.actions[i] + "\n";
        }
    }
    prompt += "\nRules:\n";
    SummaryResult r;
    static const std::regex marker(R"(^\s*(?:\d+\s*[.)]|[-*])\s*)");
    for (const auto& raw : text::split_lines(backend.complete(prompt))) {
        const std::string line = text::trim(std::regex_replace(raw, marker, ""));
        if (line.empty()) continue;
        if (auto t = normalize_statement(line)) r.candidates.push_back({line, *t, 1, Source::Learned});
        else r.dropped.push_back("cannot normalize: " + line);
    }
    return r;
}

FilterResult filter_knowledge(const std::vector<KnowledgeItem>& candidates) {
    FilterResult r;
    std::vector<KnowledgeItem> merged;
    for (const auto& c : candidates) {
        auto it = std::find_if(merged.begin(), merged.end(), [&](const auto& m) { return m.triple == c.triple; });
        if (it == merged.end()) {
            merged.push_back(c);
            continue;
        }
        it->support += c.support;
        if (c.source == Source::Human && it->source != Source::Human) {
            it->source = Source::Human;
            it->statement = c.statement;
        }
        r.log.push_back("merged duplicate: " + to_string(c.triple));
    }
    std::vector<KnowledgeItem> kept;
    std::set<std::size_t> dropped;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        for (std::size_t j = i + 1; j < merged.size(); ++j) {
            const auto& a = merged[i];
            const auto& b = merged[j];
            if (a.triple.subject != b.triple.subject || a.triple.relation != b.triple.relation) continue;
            // Same (subject, relation) after merging means opposite polarity.
            const std::string what = a.triple.subject + " " + a.triple.relation;
            if (a.source != b.source) {
                const std::size_t loser = a.source == Source::Human ? j : i;
                dropped.insert(loser);
                r.log.push_back("contradiction on " + what + ": human item kept over learned");
            } else if (a.support != b.support) {
                dropped.insert(a.support > b.support ? j : i);
                r.log.push_back("contradiction on " + what + ": kept support " + std::to_string(std::max(a.support, b.support)) +
                                " over " + std::to_string(std::min(a.support, b.support)));
            } else {
                dropped.insert(i);
                dropped.insert(j);
                r.log.push_back("contradiction on " + what + ": equal support, both dropped");
            }
        }
    }
    for (std::size_t i = 0; i < merged.size(); ++i)
        if (!dropped.count(i)) kept.push_back(merged[i]);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.support != b.support) return a.support > b.support;
        return a.statement < b.statement;
    });
    r.items = std::move(kept);
    return r;
}

std::string render_knowledge(const std::vector<KnowledgeItem>& items) {
    if (items.empty()) return "None";
    std::vector<std::string> lines;
    for (const auto& k : items) lines.push_back("- " + k.statement);
    return text::join(lines, "\n");
}

DialogueResult run_dialogue(const sim::Scenario& sc, const std::vector<KnowledgeItem>& knowledge,
                            roles::CompletionBackend& reasoner, roles::CompletionBackend& actor, int turn_cap,
                            const roles::PromptSet* prompts) {
    if (turn_cap < 1) throw std::invalid_argument("turn cap must be at least 1");
    const auto& P = prompts ? *prompts : roles::default_prompts();
    DialogueResult out;
    auto& traj = out.trajectory;
    traj.episode = sc.name;
    traj.config = {{"mode", "dialogue"}, {"turn_cap", turn_cap}, {"knowledge", knowledge.size()}};
    traj.goal_classes = roles::goal_classes(sc);
    traj.closed_goal_containers = roles::closed_goal_containers(sc);

    TextEnv env(sc);
    const std::string facts = render_knowledge(knowledge);
    std::vector<std::string> history = {"Observation: " + env.reset()};
    int commands = 0;
    auto record = [&](std::string type, std::string name, std::string detail, bool ok = true, std::string error = {}) {
        harness::TrajectoryRecord r;
        r.type = std::move(type);
        r.t = commands;
        r.name = std::move(name);
        r.detail = std::move(detail);
        r.success = ok;
        r.error = std::move(error);
        traj.records.push_back(std::move(r));
    };

    traj.termination = harness::causes::kTurnCap;
    for (int turn = 0; turn < turn_cap; ++turn) {
        const std::string rp = P.reasoner.render({{"knowledge", facts}, {"task", env.task_text()}, {"history", text::join(history, "\n")}});
        out.prompts.push_back(rp);
        const std::string said = text::trim(reasoner.complete(rp));
        out.turns.push_back({DialogueTurn::Speaker::Reasoner, said, std::nullopt});
        record("turn", "reasoner", said);

        const std::string ap = P.actor.render(
            {{"knowledge", facts}, {"task", env.task_text()}, {"history", text::join(history, "\n")}, {"plan", said}});
        out.prompts.push_back(ap);
        const std::string reply = text::trim(actor.complete(ap));
        std::string command = reply;
        static const std::regex action(R"(Action:\s*(.*))", std::regex::icase);
        std::smatch m;
        if (std::regex_search(reply, m, action)) command = text::trim(m[1].str());
        out.turns.push_back({DialogueTurn::Speaker::Actor, reply, command});
        record("turn", "actor", reply);
        history.push_back("Reasoner: " + said);
        history.push_back("Actor: " + command);

        if (text::iequals(command, "finish")) {
            traj.termination = env.success() ? harness::causes::kSuccess : harness::causes::kActorFinished;
            break;
        }
        const std::string obs = env.step(command);
        ++commands;
        history.push_back("Observation: " + obs);
        const bool ok = obs != kNothingHappens;
        record("step", command, obs, ok, ok ? "" : obs);
        if (env.success()) {
            traj.termination = harness::causes::kSuccess;
            break;
        }
    }
    traj.goal = env.goal_status();
    traj.agent_length = commands;
    return out;
}

namespace {

std::optional<sim::ObjectIndex> first_of(const sim::WorldState& s, const std::string& cls, const std::set<sim::ObjectIndex>& skip = {}) {
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
        const auto idx = static_cast<sim::ObjectIndex>(i);
        if (sim::class_name(s.info(idx).cls) == cls && !skip.count(idx)) return idx;
    }
    return std::nullopt;
}

}  // namespace

std::vector<std::string> RuleReasoner::command_plan(bool hold_one) const {
    const auto& s = env_.state();
    const auto& tg = sc_.goals.targets;
    std::vector<std::string> out;
    auto name = [&](sim::ObjectIndex i) { return env_.name_of(i); };
    auto root = [&](sim::ObjectIndex i) { return name(s.root(i)); };
    auto holder = [&](sim::ObjectIndex i) {
        const auto& loc = s.objects[i].location;
        return loc.kind == sim::Location::Kind::Inside ? name(loc.container) : name(i);
    };
    auto put = [&](sim::ObjectIndex o, sim::ObjectIndex r) {
        return "put " + name(o) + " " + preposition(s.info(r).cls) + " " + name(r);
    };
    auto need = [&](const std::string& cls, const std::set<sim::ObjectIndex>& skip = {}) {
        auto i = first_of(s, cls, skip);
        if (!i) throw std::runtime_error("scenario " + sc_.name + " has no " + cls);
        return *i;
    };
    auto fetch = [&](sim::ObjectIndex o) {
        out.push_back("go to " + root(o));
        out.push_back("take " + name(o) + " from " + holder(o));
    };

    const auto obj = need(tg.object);
    if (tg.sliced) {
        const auto knife = need("Knife");
        fetch(knife);
        out.push_back("go to " + root(obj));
        out.push_back("slice " + name(obj) + " with " + name(knife));
        out.push_back(put(knife, s.root(obj)));
    }
    const auto type = sc_.task.type;
    if (type == sim::TaskType::ExamineInLight) {
        const auto lamp = need(tg.lamp);
        fetch(obj);
        out.push_back("go to " + root(lamp));
        out.push_back("use " + name(lamp));
        return out;
    }
    const auto recep = need(tg.receptacle, {obj});
    switch (type) {
        case sim::TaskType::PickTwoPlace: {
            const auto second = need(tg.object, {obj});
            if (hold_one) {
                fetch(obj);
                out.push_back("go to " + name(recep));
                out.push_back(put(obj, recep));
                fetch(second);
                out.push_back("go to " + name(recep));
                out.push_back(put(second, recep));
            } else {
                // Assumes both can be carried together.
                fetch(obj);
                if (root(second) != root(obj)) out.push_back("go to " + root(second));
                out.push_back("take " + name(second) + " from " + holder(second));
                out.push_back("go to " + name(recep));
                out.push_back(put(obj, recep));
                out.push_back(put(second, recep));
            }
            return out;
        }
        case sim::TaskType::StackPlace: {
            const auto base = need(tg.base);
            fetch(obj);
            out.push_back("go to " + root(base));
            out.push_back(put(obj, base));
            out.push_back("take " + name(base) + " from " + holder(base));
            out.push_back("go to " + name(recep));
            out.push_back(put(base, recep));
            return out;
        }
        case sim::TaskType::CleanPlace:
        case sim::TaskType::HeatPlace:
        case sim::TaskType::CoolPlace: {
            const char* verb = type == sim::TaskType::CleanPlace ? "clean" : type == sim::TaskType::HeatPlace ? "heat" : "cool";
            const char* tool = type == sim::TaskType::CleanPlace ? "SinkBasin" : type == sim::TaskType::HeatPlace ? "Microwave" : "Fridge";
            const auto t = need(tool);
            fetch(obj);
            out.push_back("go to " + name(t));
            out.push_back(std::string(verb) + " " + name(obj) + " with " + name(t));
            out.push_back("go to " + name(recep));
            out.push_back(put(obj, recep));
            return out;
        }
        default:
            fetch(obj);
            out.push_back("go to " + name(recep));
            out.push_back(put(obj, recep));
            return out;
    }
}

std::string RuleReasoner::complete(const std::string& prompt) {
    const auto lines = text::split_lines(prompt);
    if (!plan_) {
        bool hold_one = false;
        bool in_facts = false;
        for (const auto& l : lines) {
            if (text::starts_with_ci(l, "Known facts")) {
                in_facts = true;
                continue;
            }
            if (!in_facts) continue;
            if (text::trim(l).empty()) break;
            if (auto t = normalize_statement(l); t && *t == Triple{"agent", "hold-multiple", false}) hold_one = true;
        }
        plan_ = command_plan(hold_one);
    }
    std::string last_obs;
    for (const auto& l : lines)
        if (text::starts_with_ci(l, "Observation: ")) last_obs = l.substr(13);
    static const std::regex closed(R"(The ([a-z]+ \d+) is closed\.)");
    std::smatch m;
    if (std::regex_search(last_obs, m, closed)) return "The " + m[1].str() + " is closed. I should open " + m[1].str() + ".";
    if (next_ >= plan_->size()) return "The task should be complete now.";
    return "I should " + (*plan_)[next_++] + ".";
}

std::string RuleActor::complete(const std::string& prompt) {
    std::string plan;
    for (const auto& l : text::split_lines(prompt))
        if (text::starts_with_ci(l, "Reasoner says: ")) plan = l.substr(15);
    static const std::regex should(R"(I should (.+?)\.?$)");
    std::smatch m;
    if (std::regex_search(plan, m, should)) return "Action: " + m[1].str();
    if (plan.find("complete") != std::string::npos) return "Action: finish";
    return "Action: look";
}

}  // namespace opex::knowledge
