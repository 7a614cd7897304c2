#include "hdr/service.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

namespace hdr {

namespace {

void reply_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

}  // namespace

void attach_routes(httplib::Server& server, TaskQueue& queue) {
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        reply_json(res, 200, {{"status", "ok"}});
    });

    server.Post("/tasks", [&queue](const httplib::Request& req, httplib::Response& res) {
        auto body = nlohmann::json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object() || !body.contains("query") ||
            !body.at("query").is_string() || body.at("query").get<std::string>().empty()) {
            reply_json(res, 400, {{"error", "body must be {\"query\": non-empty, \"priority\": int}"}});
            return;
        }
        int priority = body.value("priority", 0);
        auto id = queue.enqueue(body.at("query").get<std::string>(), priority);
        reply_json(res, 200, {{"task_id", id}});
    });

    server.Get(R"(/tasks/([^/]+)/report)", [&queue](const httplib::Request& req, httplib::Response& res) {
        auto id = req.matches[1].str();
        auto payload = queue.store().latest_record(RecordKind::Report, id);
        if (!payload) {
            reply_json(res, 404, {{"error", "no report for task " + id}});
            return;
        }
        reply_json(res, 200, payload->value("report", nlohmann::json::object()));
    });

    server.Get(R"(/tasks/([^/]+))", [&queue](const httplib::Request& req, httplib::Response& res) {
        auto id = req.matches[1].str();
        auto task = queue.store().get_task(id);
        if (!task) {
            reply_json(res, 404, {{"error", "unknown task " + id}});
            return;
        }
        reply_json(res, 200,
                   {{"task_id", task->id},
                    {"state", std::string(task_state_name(task->state))},
                    {"stage", task->current_stage},
                    {"attempt", task->attempt},
                    {"priority", task->priority},
                    {"progress", queue.store().progress_stages(task->id)},
                    {"error", task->error}});
    });
}

}  // namespace hdr
