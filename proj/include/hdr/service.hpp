#pragma once
#include "hdr/queue.hpp"

namespace httplib {
class Server;
}

namespace hdr {

// REST surface over the task store:
//   POST /tasks {query, priority}   -> {"task_id": ...}
//   GET  /tasks/<id>                -> state, stage, attempt, progress
//   GET  /tasks/<id>/report         -> stored report JSON
//   GET  /healthz                   -> {"status": "ok"}
void attach_routes(httplib::Server& server, TaskQueue& queue);

}  // namespace hdr
