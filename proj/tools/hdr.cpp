#include <CLI11.hpp>
#include <httplib.h>

#include <cstdio>
#include <iostream>

#include "hdr/live.hpp"
#include "hdr/pipeline.hpp"
#include "hdr/script.hpp"
#include "hdr/service.hpp"
#include "hdr/worker.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitDegraded = 2;
constexpr int kExitUnknownId = 3;
constexpr int kExitUsage = 64;

struct CommonOpts {
    std::string db_path;
    std::string script_path;
    std::string prompts_dir;
    std::string templates_dir;
    std::string lexicon_file;
    std::string catalog_file;
    std::string now;
    bool verbose = false;
};

std::string resolve_db_path(const std::string& flag_value, const std::string& fallback) {
    if (!flag_value.empty()) return flag_value;
    if (auto env = hdr::env_var("HDR_DB_PATH")) return *env;
    return fallback;
}

struct Runtime {
    hdr::ScriptBundle bundle;  // keeps scripted providers alive
    std::unique_ptr<hdr::ProviderGateway> gateway;
    std::unique_ptr<hdr::Clock> clock;
};

Runtime build_runtime(const CommonOpts& opts) {
    Runtime rt;
    hdr::GatewayConfig gateway_config;
    hdr::PromptRegistry prompts = hdr::PromptRegistry::builtin();
    std::string prompts_dir =
        !opts.prompts_dir.empty() ? opts.prompts_dir : hdr::env_var("HDR_PROMPTS_DIR").value_or("");
    if (!prompts_dir.empty()) prompts.load_overrides(prompts_dir);

    std::shared_ptr<hdr::LlmProvider> primary, fallback;
    std::vector<std::shared_ptr<hdr::SearchProvider>> searchers;
    std::optional<hdr::Date> pinned;
    if (!opts.script_path.empty()) {
        rt.bundle = hdr::load_script(opts.script_path);
        primary = rt.bundle.primary;
        fallback = rt.bundle.fallback;
        searchers = rt.bundle.searchers;
        pinned = rt.bundle.now;
    } else {
        auto live = hdr::providers_from_env(gateway_config);
        primary = live.primary;
        fallback = live.fallback;
        searchers = live.searchers;
        if (!primary && !fallback) {
            throw hdr::Error("no providers: pass --script or set HDR_LLM_PRIMARY_URL/HDR_SEARCH_PROVIDERS");
        }
    }
    rt.gateway = std::make_unique<hdr::ProviderGateway>(primary, fallback, searchers, std::move(prompts),
                                                        gateway_config);

    if (!opts.now.empty()) {
        auto d = hdr::parse_date(opts.now);
        if (!d) throw hdr::Error("--now must be YYYY-MM-DD");
        pinned = d;
    }
    if (pinned) {
        rt.clock = std::make_unique<hdr::FakeClock>(*pinned);
    } else {
        rt.clock = std::make_unique<hdr::SystemClock>();
    }
    return rt;
}

hdr::PipelineConfig build_pipeline_config(const CommonOpts& opts) {
    hdr::PipelineConfig config;
    std::string catalog = !opts.catalog_file.empty() ? opts.catalog_file
                                                     : hdr::env_var("HDR_CATALOG_FILE").value_or("");
    if (!catalog.empty()) config.catalog = hdr::SourceCatalog::from_file(catalog);
    std::string lexicon = !opts.lexicon_file.empty() ? opts.lexicon_file
                                                     : hdr::env_var("HDR_LEXICON_FILE").value_or("");
    if (!lexicon.empty()) config.lexicon = hdr::TemporalLexicon::from_file(lexicon);
    std::string templates = !opts.templates_dir.empty() ? opts.templates_dir
                                                        : hdr::env_var("HDR_TEMPLATES_DIR").value_or("");
    if (!templates.empty()) config.templates.load_overrides(templates);
    return config;
}

hdr::QueueConfig queue_config_from_env() {
    hdr::QueueConfig qc;
    if (auto t = hdr::env_var("HDR_HEARTBEAT_TIMEOUT_SECS")) {
        try {
            qc.heartbeat_timeout_secs = std::stol(*t);
        } catch (...) {
            throw hdr::Error("HDR_HEARTBEAT_TIMEOUT_SECS must be an integer");
        }
    }
    return qc;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_providers) {
    cmd->add_option("--db", opts.db_path, "Store path (default HDR_DB_PATH, else in-memory)");
    if (with_providers) {
        cmd->add_option("--script", opts.script_path, "Scripted provider fixture (JSON)");
        cmd->add_option("--prompts", opts.prompts_dir, "Prompt template override directory");
        cmd->add_option("--now", opts.now, "Pin the clock to a date (YYYY-MM-DD)");
    }
    cmd->add_option("--templates", opts.templates_dir, "Report template override directory");
    cmd->add_option("--lexicon", opts.lexicon_file, "Temporal lexicon JSON file");
    cmd->add_option("--catalog", opts.catalog_file, "Source catalog JSON file");
    cmd->add_flag("--verbose", opts.verbose, "Log progress to stderr");
}

int cmd_run(const CommonOpts& opts, const std::string& query, const std::string& subject,
            const std::vector<std::string>& aliases, const std::vector<std::string>& descriptors,
            int d_max, int max_iterations, double alpha, double beta, double gamma,
            const std::string& format, const std::string& out_path) {
    hdr::set_log_verbose(opts.verbose);
    auto rt = build_runtime(opts);
    auto store = hdr::open_store(resolve_db_path(opts.db_path, ":memory:"));
    hdr::TaskQueue queue(*store, *rt.clock, queue_config_from_env());

    auto config = build_pipeline_config(opts);
    if (d_max > 0) config.d_max_override = d_max;
    config.max_iterations = max_iterations;
    config.alpha = alpha;
    config.beta = beta;
    config.gamma = gamma;
    if (!subject.empty()) {
        hdr::SubjectProfile profile;
        profile.canonical_name = subject;
        profile.aliases = aliases;
        profile.descriptors = descriptors;
        config.subject_override = profile;
    }

    hdr::Orchestrator orchestrator(*rt.gateway, *store, *rt.clock, std::move(config));
    // Synchronous mode still routes through the queue state machine so the
    // stored task row and report match the async path byte for byte.
    auto id = queue.enqueue(query, 0);
    auto task = queue.claim("cli");
    if (!task) return kExitFailure;

    try {
        auto sink = [&](int stage) { queue.heartbeat(task->id, "cli", stage); };
        auto result = orchestrator.execute(*task, sink);
        queue.finish(task->id, "cli", true);

        std::string rendered = format == "json" ? result.report.json.dump(2) + "\n" : result.report.markdown;
        if (!out_path.empty()) {
            std::FILE* f = std::fopen(out_path.c_str(), "wb");
            if (!f) throw hdr::Error("cannot write " + out_path);
            std::fwrite(rendered.data(), 1, rendered.size(), f);
            std::fclose(f);
        } else {
            std::fwrite(rendered.data(), 1, rendered.size(), stdout);
        }
        std::fprintf(stderr, "[hdr] task %s completed%s\n", id.c_str(),
                     result.record.degraded ? " (degraded)" : "");
        return result.record.degraded ? kExitDegraded : kExitOk;
    } catch (const hdr::StageFailure& e) {
        queue.finish(task->id, "cli", false, e.what());
        std::fprintf(stderr, "[hdr] %s\n", e.what());
        return kExitFailure;
    }
}

int cmd_worker(const CommonOpts& opts, int concurrency, bool drain, int poll_ms) {
    hdr::set_log_verbose(opts.verbose);
    auto rt = build_runtime(opts);
    auto store = hdr::open_store(resolve_db_path(opts.db_path, "hdr.db"));
    hdr::TaskQueue queue(*store, *rt.clock, queue_config_from_env());
    hdr::Orchestrator orchestrator(*rt.gateway, *store, *rt.clock, build_pipeline_config(opts));

    hdr::WorkerPoolConfig pool_config;
    pool_config.concurrency = concurrency;
    pool_config.drain = drain;
    pool_config.poll_ms = poll_ms;
    hdr::WorkerPool pool(queue, orchestrator, *rt.clock, pool_config);
    pool.start();
    pool.wait();
    return kExitOk;
}

int cmd_serve(const CommonOpts& opts, const std::string& host, int port) {
    hdr::set_log_verbose(opts.verbose);
    hdr::SystemClock clock;
    auto store = hdr::open_store(resolve_db_path(opts.db_path, "hdr.db"));
    hdr::TaskQueue queue(*store, clock, queue_config_from_env());
    httplib::Server server;
    hdr::attach_routes(server, queue);
    std::fprintf(stderr, "[hdr] serving on %s:%d\n", host.c_str(), port);
    if (!server.listen(host, port)) {
        std::fprintf(stderr, "[hdr] cannot bind %s:%d\n", host.c_str(), port);
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_status(const CommonOpts& opts, const std::string& id) {
    auto store = hdr::open_store(resolve_db_path(opts.db_path, "hdr.db"));
    auto task = store->get_task(id);
    if (!task) {
        std::fprintf(stderr, "unknown task id: %s\n", id.c_str());
        return kExitUnknownId;
    }
    std::printf("%s: %s, stage %d, attempt %d", task->id.c_str(),
                std::string(hdr::task_state_name(task->state)).c_str(), task->current_stage, task->attempt);
    if (!task->error.empty()) std::printf(", error: %s", task->error.c_str());
    std::printf("\n");
    return kExitOk;
}

int cmd_report(const CommonOpts& opts, const std::string& id, const std::string& format) {
    auto store = hdr::open_store(resolve_db_path(opts.db_path, "hdr.db"));
    auto payload = store->latest_record(hdr::RecordKind::Report, id);
    if (!payload) {
        std::fprintf(stderr, "no stored report for task id: %s\n", id.c_str());
        return kExitUnknownId;
    }
    // Always the stored bytes; the CLI never recomputes report numbers.
    if (format == "json") {
        std::string text = payload->value("report", nlohmann::json::object()).dump(2) + "\n";
        std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
        std::string text = payload->value("markdown", "");
        std::fwrite(text.data(), 1, text.size(), stdout);
    }
    return kExitOk;
}

int cmd_log(const CommonOpts& opts, const std::string& id) {
    auto store = hdr::open_store(resolve_db_path(opts.db_path, "hdr.db"));
    auto log = store->load_decision_log(id);
    if (!log) {
        std::fprintf(stderr, "no decision log for task id: %s\n", id.c_str());
        return kExitUnknownId;
    }
    std::string text = log->dump(2) + "\n";
    std::fwrite(text.data(), 1, text.size(), stdout);
    return kExitOk;
}

int cmd_queue_list(const CommonOpts& opts) {
    auto store = hdr::open_store(resolve_db_path(opts.db_path, "hdr.db"));
    for (const auto& t : store->list_tasks()) {
        std::printf("%s  %-9s  prio %-3d  stage %d  attempt %d  %s\n", t.id.c_str(),
                    std::string(hdr::task_state_name(t.state)).c_str(), t.priority, t.current_stage,
                    t.attempt, t.query.c_str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hdr - hypothesis-driven deep research engine"};
    app.require_subcommand(1);

    CommonOpts run_opts;
    std::string query, subject, format = "md", out_path;
    std::vector<std::string> aliases, descriptors;
    int d_max = 0, max_iterations = 2;
    double alpha = 1.0 / 3.0, beta = 1.0 / 3.0, gamma = 1.0 / 3.0;
    auto* run = app.add_subcommand("run", "Run one research query synchronously");
    run->add_option("--query", query, "Research query text")->required();
    run->add_option("--subject", subject, "Target subject entity (overrides detection)");
    run->add_option("--alias", aliases, "Subject alias (repeatable)");
    run->add_option("--descriptor", descriptors, "Subject descriptor term (repeatable)");
    run->add_option("--d-max", d_max, "Override recursion depth budget");
    run->add_option("--max-iterations", max_iterations, "Gap loop iteration budget (default 2)");
    run->add_option("--alpha", alpha, "Completeness weight");
    run->add_option("--beta", beta, "Accuracy weight");
    run->add_option("--gamma", gamma, "Traceability weight");
    run->add_option("--format", format, "Report format: md or json")
        ->check(CLI::IsMember({"md", "json"}));
    run->add_option("--out", out_path, "Write the report to a file instead of stdout");
    add_common(run, run_opts, true);

    CommonOpts worker_opts;
    int concurrency = 1, poll_ms = 200;
    bool drain = false;
    auto* worker = app.add_subcommand("worker", "Run queue workers");
    worker->add_option("--concurrency", concurrency, "Worker thread count")->check(CLI::PositiveNumber);
    worker->add_option("--poll-ms", poll_ms, "Queue poll interval");
    worker->add_flag("--drain", drain, "Exit when the queue is empty");
    add_common(worker, worker_opts, true);

    CommonOpts serve_opts;
    std::string host = "127.0.0.1";
    int port = 8787;
    auto* serve = app.add_subcommand("serve", "Serve the task HTTP API");
    serve->add_option("--host", host, "Bind host");
    serve->add_option("--port", port, "Bind port");
    add_common(serve, serve_opts, false);

    CommonOpts status_opts;
    std::string status_id;
    auto* status = app.add_subcommand("status", "Show task state");
    status->add_option("id", status_id, "Task id")->required();
    add_common(status, status_opts, false);

    CommonOpts report_opts;
    std::string report_id, report_format = "md";
    auto* report = app.add_subcommand("report", "Print a stored report");
    report->add_option("id", report_id, "Task id")->required();
    report->add_option("--format", report_format, "md or json")->check(CLI::IsMember({"md", "json"}));
    add_common(report, report_opts, false);

    CommonOpts log_opts;
    std::string log_id;
    auto* log_cmd = app.add_subcommand("log", "Dump a task's decision log");
    log_cmd->add_option("id", log_id, "Task id")->required();
    add_common(log_cmd, log_opts, false);

    CommonOpts queue_opts;
    auto* queue_cmd = app.add_subcommand("queue", "Queue operations");
    auto* queue_list = queue_cmd->add_subcommand("list", "List tasks");
    add_common(queue_list, queue_opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run->parsed()) {
            return cmd_run(run_opts, query, subject, aliases, descriptors, d_max, max_iterations, alpha,
                           beta, gamma, format, out_path);
        }
        if (worker->parsed()) return cmd_worker(worker_opts, concurrency, drain, poll_ms);
        if (serve->parsed()) return cmd_serve(serve_opts, host, port);
        if (status->parsed()) return cmd_status(status_opts, status_id);
        if (report->parsed()) return cmd_report(report_opts, report_id, report_format);
        if (log_cmd->parsed()) return cmd_log(log_opts, log_id);
        if (queue_cmd->parsed() && queue_list->parsed()) return cmd_queue_list(queue_opts);
        return kExitUsage;
    } catch (const hdr::Error& e) {
        std::fprintf(stderr, "[hdr] error: %s\n", e.what());
        return kExitFailure;
    }
}
