#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "opex/harness/generator.hpp"
#include "opex/harness/metrics.hpp"
#include "opex/harness/runner.hpp"
#include "opex/harness/suites.hpp"
#include "opex/knowledge/knowledge.hpp"
#include "opex/nav/fmm.hpp"
#include "opex/roles/agent.hpp"
#include "opex/roles/oracle.hpp"
#include "opex/selector/selector.hpp"

using namespace opex;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<harness::Trajectory> read_log(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open log " + p.string());
    return harness::read_jsonl(in);
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << s;
}

std::vector<sim::Scenario> load_scenarios(const std::vector<std::string>& paths) {
    std::vector<sim::Scenario> out;
    for (const auto& p : paths) out.push_back(sim::load_scenario_file(p));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"opex: embodied agent over a grid household simulator"};
    app.require_subcommand(1);

    // run
    harness::EpisodeConfig run_cfg;
    std::string run_backend = "oracle", run_mode = "agent", run_log;
    std::vector<std::string> run_ablate;
    double run_noise = -1;
    std::uint64_t run_seed = 0;
    std::string run_transcript, run_pool, run_knowledge;
    auto* run = app.add_subcommand("run", "run one episode and write its trajectory log");
    run->add_option("scenario", run_cfg.scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
    run->add_option("--backend", run_backend, "oracle, scripted or remote")->check(CLI::IsMember({"oracle", "scripted", "remote"}));
    run->add_option("--mode", run_mode, "agent or dialogue")->check(CLI::IsMember({"agent", "dialogue"}));
    auto* noise_opt = run->add_option("--noise", run_noise, "mislabel probability");
    auto* seed_opt = run->add_option("--seed", run_seed, "episode seed");
    run->add_option("--ablate", run_ablate, "disable a component")->check(CLI::IsMember(harness::ablation_names()));
    run->add_option("--transcript", run_transcript, "scripted backend transcript");
    run->add_option("--pool", run_pool, "example pool for the planner");
    run->add_option("--k", run_cfg.k, "examples per prompt");
    run->add_option("--knowledge", run_knowledge, "knowledge file (dialogue)");
    run->add_option("--turn-cap", run_cfg.turn_cap, "dialogue turn cap");
    run->add_option("--base-url", run_cfg.remote.base_url, "remote endpoint");
    run->add_option("--model", run_cfg.remote.model, "remote model");
    run->add_option("--log", run_log, "trajectory log (stdout when absent)");

    // suite
    std::string suite_manifest, suite_csv, suite_log, suite_summary;
    int suite_jobs = 1;
    std::vector<std::string> suite_ablate;
    double suite_noise = -1;
    auto* suite = app.add_subcommand("suite", "run a manifest and report metrics");
    suite->add_option("manifest", suite_manifest)->required()->check(CLI::ExistingFile);
    suite->add_option("--jobs", suite_jobs, "parallel episodes");
    suite->add_option("--ablate", suite_ablate, "disable a component in every episode")->check(CLI::IsMember(harness::ablation_names()));
    auto* suite_noise_opt = suite->add_option("--noise", suite_noise, "override mislabel probability");
    suite->add_option("--csv", suite_csv, "results table");
    suite->add_option("--log", suite_log, "trajectory log");
    suite->add_option("--summary", suite_summary, "summary JSON");

    // metrics / classify
    std::string metrics_log, classify_log;
    auto* metrics = app.add_subcommand("metrics", "SR, GC, PLWSR and PLWGC of a trajectory log");
    metrics->add_option("log", metrics_log)->required()->check(CLI::ExistingFile);
    auto* classify = app.add_subcommand("classify", "error mode of every failed episode in a log");
    classify->add_option("log", classify_log)->required()->check(CLI::ExistingFile);

    // knowledge
    auto* kn = app.add_subcommand("knowledge", "prior-knowledge pipeline");
    kn->require_subcommand(1);
    std::vector<std::string> kx_scenarios;
    int kx_budget = 6;
    std::uint64_t kx_seed = 7;
    std::string kx_out;
    auto* kx = kn->add_subcommand("explore", "collect action-observation sequences");
    kx->add_option("scenarios", kx_scenarios)->required()->check(CLI::ExistingFile);
    kx->add_option("--budget", kx_budget, "episodes");
    kx->add_option("--seed", kx_seed);
    kx->add_option("--out", kx_out)->required();
    std::string ks_log, ks_out;
    int ks_threshold = knowledge::kRepetitionThreshold;
    auto* ks = kn->add_subcommand("summarize", "candidate knowledge from an exploration log");
    ks->add_option("log", ks_log)->required()->check(CLI::ExistingFile);
    ks->add_option("--threshold", ks_threshold, "episodes a pattern must recur in");
    ks->add_option("--out", ks_out)->required();
    std::vector<std::string> kf_inputs;
    std::string kf_out;
    auto* kf = kn->add_subcommand("filter", "merge duplicates and resolve contradictions");
    kf->add_option("inputs", kf_inputs, "candidate and human knowledge files")->required()->check(CLI::ExistingFile);
    kf->add_option("--out", kf_out)->required();
    std::string kshow_file;
    auto* kshow = kn->add_subcommand("show", "print a knowledge file as prompt text");
    kshow->add_option("file", kshow_file)->required()->check(CLI::ExistingFile);

    // pool
    auto* pool = app.add_subcommand("pool", "in-context example pool");
    pool->require_subcommand(1);
    std::string pool_out;
    int pool_per_type = 10;
    auto* pool_build = pool->add_subcommand("build", "generate the example pool");
    pool_build->add_option("--out", pool_out)->required();
    pool_build->add_option("--per-type", pool_per_type);
    std::string pool_query_file, pool_query;
    std::size_t pool_k = 3;
    auto* pool_select = pool->add_subcommand("select", "top-k examples for an instruction");
    pool_select->add_option("pool", pool_query_file)->required()->check(CLI::ExistingFile);
    pool_select->add_option("instruction", pool_query)->required();
    pool_select->add_option("--k", pool_k);

    // debugging views
    std::string dm_scenario;
    double dm_noise = 0;
    auto* dump_maps = app.add_subcommand("dump-maps", "run the oracle agent and print its final maps");
    dump_maps->add_option("scenario", dm_scenario)->required()->check(CLI::ExistingFile);
    dump_maps->add_option("--noise", dm_noise);
    std::string df_scenario, df_target;
    auto* dump_field = app.add_subcommand("dump-field", "FMM distance field to a class on the true grid");
    dump_field->add_option("scenario", df_scenario)->required()->check(CLI::ExistingFile);
    dump_field->add_option("--target", df_target, "object class (default: the goal object)");

    // gen
    auto* gen = app.add_subcommand("gen", "generate scenarios");
    std::string gen_type = "Pick&Place", gen_style = "showcase", gen_out, gen_name = "generated", gen_data;
    std::uint64_t gen_seed = 1;
    bool gen_sliced = false;
    double gen_noise = 0;
    int gen_distractors = 1;
    gen->add_option("--type", gen_type);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--style", gen_style)->check(CLI::IsMember({"showcase", "cluttered"}));
    gen->add_flag("--sliced", gen_sliced);
    gen->add_option("--noise", gen_noise);
    gen->add_option("--distractors", gen_distractors);
    gen->add_option("--name", gen_name);
    gen->add_option("--out", gen_out, "scenario file (stdout when absent)");
    gen->add_option("--standard", gen_data, "write every shipped suite, pool and learned knowledge under this data directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            run_cfg.backend = harness::parse_backend(run_backend);
            run_cfg.mode = run_mode == "agent" ? harness::EpisodeMode::Agent : harness::EpisodeMode::Dialogue;
            if (*noise_opt) run_cfg.noise = run_noise;
            if (*seed_opt) run_cfg.seed = run_seed;
            for (const auto& a : run_ablate) harness::disable(run_cfg.ablate, a);
            run_cfg.transcript = run_transcript;
            run_cfg.pool = run_pool;
            run_cfg.knowledge = run_knowledge;
            const auto t = harness::run_episode(run_cfg);
            if (run_log.empty()) harness::write_jsonl(std::cout, t);
            else write_text(run_log, harness::to_jsonl(t));
            std::cerr << t.episode << ": " << t.termination << ", GC " << t.goal.satisfied << "/" << t.goal.total << ", L̂ "
                      << t.agent_length << ", L* " << (t.expert_length ? std::to_string(*t.expert_length) : "?") << "\n";
            return t.goal.success ? 0 : 1;
        }
        if (*suite) {
            auto cfgs = harness::load_manifest(suite_manifest);
            for (auto& c : cfgs) {
                for (const auto& a : suite_ablate) harness::disable(c.ablate, a);
                if (*suite_noise_opt) c.noise = suite_noise;
            }
            const auto r = harness::run_suite(cfgs, suite_jobs);
            if (!suite_csv.empty()) write_text(suite_csv, harness::results_csv(r));
            if (!suite_log.empty()) {
                std::ostringstream s;
                for (const auto& t : r.trajectories) harness::write_jsonl(s, t);
                write_text(suite_log, s.str());
            }
            const auto summary = harness::summary_json(r);
            if (!suite_summary.empty()) write_text(suite_summary, summary.dump(2) + "\n");
            std::cout << summary.dump(2) << "\n";
            return 0;
        }
        if (*metrics) {
            const auto m = harness::compute_metrics(read_log(metrics_log));
            std::cout << json{{"SR", 100 * m.sr}, {"GC", 100 * m.gc}, {"PLWSR", 100 * m.plwsr}, {"PLWGC", 100 * m.plwgc},
                              {"episodes", m.episodes.size()}}
                             .dump(2)
                      << "\n";
            return 0;
        }
        if (*classify) {
            for (const auto& t : read_log(classify_log))
                std::cout << t.episode << "," << (t.goal.success ? "success" : harness::to_string(harness::classify_error(t))) << "\n";
            return 0;
        }
        if (*kx) {
            const auto explorer = [](const sim::Scenario&, std::uint64_t s) { return std::make_unique<knowledge::RuleExplorer>(s); };
            const auto log = knowledge::explore_collect(load_scenarios(kx_scenarios), explorer, kx_budget, kx_seed);
            write_text(kx_out, knowledge::log_json(log).dump(2) + "\n");
            return 0;
        }
        if (*ks) {
            std::ifstream in(ks_log);
            const auto log = knowledge::log_from_json(json::parse(in));
            knowledge::save_knowledge(ks_out, knowledge::summarize_rules(log, ks_threshold).candidates);
            return 0;
        }
        if (*kf) {
            std::vector<knowledge::KnowledgeItem> all;
            for (const auto& f : kf_inputs) {
                auto items = knowledge::load_knowledge(f);
                all.insert(all.end(), items.begin(), items.end());
            }
            const auto r = knowledge::filter_knowledge(all);
            for (const auto& l : r.log) std::cerr << l << "\n";
            knowledge::save_knowledge(kf_out, r.items);
            return 0;
        }
        if (*kshow) {
            for (const auto& k : knowledge::load_knowledge(kshow_file))
                std::cout << k.statement << "  [" << knowledge::to_string(k.triple) << ", support " << k.support << ", "
                          << knowledge::to_string(k.source) << "]\n";
            return 0;
        }
        if (*pool_build) {
            selector::HashEmbedding hash;
            harness::build_example_pool(hash, pool_per_type).save(pool_out);
            return 0;
        }
        if (*pool_select) {
            selector::HashEmbedding hash;
            const auto p = selector::ExamplePool::load(pool_query_file, &hash);
            for (const auto& r : selector::select_top_k(pool_query, p, pool_k, hash))
                std::cout << r.similarity << "\t" << p.entries[r.index].instruction << "\n";
            return 0;
        }
        if (*dump_maps) {
            auto sc = sim::load_scenario_file(dm_scenario);
            if (dm_noise > 0) {
                sc.noise.mislabel = dm_noise;
                if (sc.noise.confusion.empty()) sc.noise.confusion = harness::default_confusion();
            }
            sim::Simulator s(sc);
            skills::AgentContext ctx(s);
            roles::RuleOraclePlanner pl(sc.task.type, sc.goals.targets);
            roles::RuleOracleObserver ob;
            roles::RuleOracleExecutor ex;
            const auto t = roles::run_agent(ctx, {&pl, &ob, &ex}, {});
            std::cout << ctx.maps.dump() << "\n" << t.termination << "\n";
            return 0;
        }
        if (*dump_field) {
            const auto sc = sim::load_scenario_file(df_scenario);
            const auto& st = sc.initial;
            const std::string target = df_target.empty() ? sc.goals.targets.object : df_target;
            const auto cls = sim::find_class(target);
            if (!cls) throw std::runtime_error("unknown class " + target);
            sim::CellMask free(st.grid().rows(), st.grid().cols());
            for (int r = 0; r < st.grid().rows(); ++r)
                for (int c = 0; c < st.grid().cols(); ++c) free.set({r, c}, st.traversable({r, c}));
            std::vector<sim::Cell> goals;
            for (std::size_t i = 0; i < st.objects.size(); ++i) {
                const auto idx = static_cast<sim::ObjectIndex>(i);
                if (st.info(idx).cls != *cls) continue;
                const auto cell = st.cell_of(idx);
                if (!cell) continue;
                for (auto h : {sim::Heading::North, sim::Heading::East, sim::Heading::South, sim::Heading::West}) {
                    const auto n = sim::ahead(*cell, h);
                    if (free.in_bounds(n) && free.at(n)) goals.push_back(n);
                }
            }
            if (goals.empty()) throw std::runtime_error("no reachable cell next to a " + target);
            std::cout << nav::fmm_distance_field(free, goals).render() << "\n";
            return 0;
        }
        if (*gen) {
            if (!gen_data.empty()) {
                harness::write_standard_suites(gen_data, &std::cerr);
                return 0;
            }
            harness::GeneratorOptions opt;
            const auto type = sim::parse_task_type(gen_type);
            if (!type) throw std::runtime_error("unknown task type " + gen_type);
            opt.type = *type;
            opt.seed = gen_seed;
            opt.style = gen_style == "showcase" ? harness::LayoutStyle::Showcase : harness::LayoutStyle::Cluttered;
            opt.sliced = gen_sliced;
            opt.mislabel = gen_noise;
            opt.distractors = gen_distractors;
            const auto doc = harness::generate_scenario(opt, gen_name);
            if (gen_out.empty()) std::cout << doc.dump(2) << "\n";
            else write_text(gen_out, doc.dump(2) + "\n");
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
