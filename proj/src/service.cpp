#include "incorr/service.hpp"

#include <cstdio>
#include <iostream>

#include "httplib.h"

#include "incorr/error.hpp"
#include "incorr/io.hpp"
#include "incorr/layout.hpp"
#include "incorr/project.hpp"
#include "incorr/render.hpp"
#include "incorr/strata.hpp"

namespace incorr {

ProjectService::ProjectService(Project initial, std::optional<std::filesystem::path> persist_path)
    : persist_path_(std::move(persist_path)) {
  state_.project = std::make_shared<const Project>(std::move(initial));
}

ProjectService::Snapshot ProjectService::snapshot() const {
  std::lock_guard lock(publish_mutex_);
  return {state_.project, state_.revision};
}

ProjectService::Snapshot ProjectService::mutate(const std::function<Project(const Project&)>& edit,
                                                std::optional<std::uint64_t> expected_revision) {
  std::lock_guard writer(writer_mutex_);
  const Snapshot current = snapshot();
  if (expected_revision && *expected_revision != current.revision) {
    throw Error(ErrorCode::StaleRevision, "revision " + std::to_string(*expected_revision) +
                                              " is stale; current revision is " + std::to_string(current.revision));
  }
  auto next = std::make_shared<const Project>(edit(*current.project));
  if (persist_path_) write_file_atomic(*persist_path_, save_project(*next));

  std::lock_guard lock(publish_mutex_);
  state_.project = next;
  state_.revision = current.revision + 1;
  return {state_.project, state_.revision};
}

std::string ProjectService::panel_svg() const { return render_project(*snapshot().project); }

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownStratum:
    case ErrorCode::UnknownRockType:
    case ErrorCode::UnknownMeasurement:
    case ErrorCode::UnknownCorrelation:
    case ErrorCode::UnknownLog:
    case ErrorCode::UnknownContact:
      return 404;
    case ErrorCode::StaleRevision:
    case ErrorCode::ContactInUse:
      return 409;
    default:
      return 400;
  }
}

namespace {

void send_json(httplib::Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                const std::string& subject = {}) {
  Json body;
  body["error"] = code;
  body["message"] = message;
  if (!subject.empty()) body["subject"] = subject;
  send_json(res, body, status);
}

std::optional<std::uint64_t> expected_revision(const httplib::Request& req) {
  if (!req.has_header("If-Match")) return std::nullopt;
  std::string v = req.get_header_value("If-Match");
  std::erase(v, '"');
  try {
    std::size_t used = 0;
    const unsigned long long r = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return r;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "If-Match must hold a revision number");
  }
}

// Runs a handler and turns library errors into JSON error responses.
template <class Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), to_string(e.code()), e.what(), e.subject());
    } catch (const std::exception& e) {
      send_error(res, 500, "InternalError", e.what());
    }
  };
}

Json body_of(const httplib::Request& req) {
  const Json body = parse_json(req.body);
  if (!body.is_object()) throw Error(ErrorCode::SchemaError, "/: expected object");
  return body;
}

PickInput pick_from(const JsonReader& r) { return {r.string("contact_id"), r.vec3("point")}; }

Json with_revision(std::uint64_t revision, std::string_view key, Json value) {
  Json j;
  j["revision"] = revision;
  j[std::string(key)] = std::move(value);
  return j;
}

const GeoLog& log_in(const Project& p, const std::string& id) {
  const GeoLog* log = p.find_log(id);
  if (log == nullptr) throw Error(ErrorCode::UnknownLog, "unknown log '" + id + "'", id);
  return *log;
}

}  // namespace

void install_routes(httplib::Server& server, ProjectService& service,
                    const std::optional<std::filesystem::path>& ui_dir) {
  server.Get("/api/project", guarded([&](const httplib::Request&, httplib::Response& res) {
               const auto snap = service.snapshot();
               send_json(res, with_revision(snap.revision, "project", project_to_json(*snap.project)));
             }));

  server.Get("/api/outcrop-strip", guarded([&](const httplib::Request&, httplib::Response& res) {
               const auto snap = service.snapshot();
               send_json(res, with_revision(snap.revision, "strip",
                                            strip_to_json(project_outcrop_strip(snap.project->dataset.contacts))));
             }));

  server.Get("/api/panel.svg", guarded([&](const httplib::Request&, httplib::Response& res) {
               const auto snap = service.snapshot();
               res.set_header("ETag", "\"" + std::to_string(snap.revision) + "\"");
               res.set_content(render_project(*snap.project), "image/svg+xml");
             }));

  server.Post("/api/plane-preview", guarded([&](const httplib::Request& req, httplib::Response& res) {
                const Json body = body_of(req);
                const JsonReader r(body, "");
                const auto snap = service.snapshot();
                const Plane plane = preview_plane(snap.project->dataset, r.string("contact_id"));
                Json out;
                out["contact_id"] = r.string("contact_id");
                out["plane"] = plane_to_json(plane);
                out["dip_strike"] = dip_strike_to_json(dip_and_strike(plane));
                send_json(res, out);
              }));

  server.Post("/api/logs", guarded([&](const httplib::Request& req, httplib::Response& res) {
                const Json body = body_of(req);
                const JsonReader r(body, "");
                std::optional<std::string> id;
                if (r.has("id") && !r.is_null("id")) id = r.string("id");
                const std::string name = r.has("name") ? r.string("name") : std::string();
                const std::string ref = r.string("reference_contact_id");
                std::vector<PickInput> picks;
                const JsonReader list = r.at("picks");
                for (std::size_t i = 0; i < list.size(); ++i) picks.push_back(pick_from(list.at(i)));

                std::string created;
                const auto snap = service.mutate(
                    [&](const Project& p) {
                      Project next = add_log(p, id, name, ref, picks);
                      created = next.logs.back().id;
                      return next;
                    },
                    expected_revision(req));
                send_json(res, with_revision(snap.revision, "log", log_to_json(log_in(*snap.project, created))), 201);
              }));

  server.Patch(R"(/api/logs/([^/]+)/picks)", guarded([&](const httplib::Request& req, httplib::Response& res) {
                 const std::string log_id = req.matches[1];
                 const Json body = body_of(req);
                 const JsonReader r(body, "");
                 const std::string op = r.string("op");
                 const std::string contact = r.string("contact_id");
                 std::function<Project(const Project&)> edit;
                 if (op == "add") {
                   const PickInput pick = pick_from(r);
                   edit = [&, pick](const Project& p) { return add_pick(p, log_id, pick); };
                 } else if (op == "move") {
                   const PickInput pick = pick_from(r);
                   edit = [&, pick](const Project& p) { return move_pick(p, log_id, pick); };
                 } else if (op == "remove") {
                   edit = [&](const Project& p) { return remove_pick(p, log_id, contact); };
                 } else {
                   r.at("op").fail("expected \"add\", \"move\" or \"remove\"");
                 }
                 const auto snap = service.mutate(edit, expected_revision(req));
                 send_json(res, with_revision(snap.revision, "log", log_to_json(log_in(*snap.project, log_id))));
               }));

  server.Patch(R"(/api/strata/([^/]+)/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
                 const std::string log_id = req.matches[1];
                 const std::string stratum = req.matches[2];
                 const Json body = body_of(req);
                 const JsonReader r(body, "");
                 StratumUpdate update;
                 if (r.has("rock_type_id")) {
                   update.rock_type_id = r.is_null("rock_type_id") ? std::optional<std::string>()
                                                                   : std::optional<std::string>(r.string("rock_type_id"));
                 }
                 if (r.has("uncertain")) update.uncertain = r.boolean("uncertain");
                 if (r.has("crossbed_ids")) update.crossbed_ids = r.string_list("crossbed_ids");
                 const auto snap = service.mutate(
                     [&](const Project& p) { return update_stratum(p, log_id, stratum, update); },
                     expected_revision(req));
                 const GeoLog& log = log_in(*snap.project, log_id);
                 Json out = with_revision(snap.revision, "log_id", log.id);
                 out["stratum_id"] = stratum;
                 out["strata"] = log_to_json(log)["strata"];
                 out["tree"] = tree_to_json(log.tree.root);
                 send_json(res, out);
               }));

  server.Post("/api/correlations", guarded([&](const httplib::Request& req, httplib::Response& res) {
                const Json body = body_of(req);
                const JsonReader r(body, "");
                CorrelationInput in;
                if (r.has("id") && !r.is_null("id")) in.id = r.string("id");
                const JsonReader refs = r.at("contact_refs");
                for (std::size_t i = 0; i < refs.size(); ++i) {
                  in.contact_refs.push_back({refs.at(i).string("log_id"), refs.at(i).string("contact_id")});
                }
                if (r.has("segment_uncertain")) {
                  std::vector<bool> flags;
                  const JsonReader fl = r.at("segment_uncertain");
                  for (std::size_t i = 0; i < fl.size(); ++i) {
                    if (!fl.at(i).node().is_boolean()) fl.at(i).fail("expected boolean");
                    flags.push_back(fl.at(i).node().get<bool>());
                  }
                  in.segment_uncertain = std::move(flags);
                }
                if (r.has("color")) in.color = r.color("color");
                std::string created;
                const auto snap = service.mutate(
                    [&](const Project& p) {
                      Project next = add_correlation(p, in);
                      created = next.panel.correlations.back().id;
                      return next;
                    },
                    expected_revision(req));
                send_json(res,
                          with_revision(snap.revision, "correlation",
                                        correlation_to_json(*snap.project->find_correlation(created))),
                          201);
              }));

  server.Patch(R"(/api/correlations/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 const Json body = body_of(req);
                 const JsonReader r(body, "");
                 std::vector<bool> flags;
                 const JsonReader fl = r.at("segment_uncertain");
                 for (std::size_t i = 0; i < fl.size(); ++i) {
                   if (!fl.at(i).node().is_boolean()) fl.at(i).fail("expected boolean");
                   flags.push_back(fl.at(i).node().get<bool>());
                 }
                 const auto snap = service.mutate(
                     [&](const Project& p) { return set_segment_uncertainty(p, id, flags); }, expected_revision(req));
                 send_json(res, with_revision(snap.revision, "correlation",
                                              correlation_to_json(*snap.project->find_correlation(id))));
               }));

  server.Post("/api/panel/level", guarded([&](const httplib::Request& req, httplib::Response& res) {
                const Json body = body_of(req);
                const JsonReader r(body, "");
                std::optional<std::string> target;
                if (!r.is_null("correlation_id")) target = r.string("correlation_id");
                const auto snap = service.mutate([&](const Project& p) { return set_leveling(p, target); },
                                                 expected_revision(req));
                const Panel& panel = snap.project->panel;
                const std::vector<double> offsets = compute_offsets(panel, snap.project->logs);
                Json list = Json::array();
                for (std::size_t i = 0; i < offsets.size(); ++i) {
                  list.push_back({{"log_id", panel.log_order[i]}, {"y_offset_px", offsets[i]}});
                }
                Json out = with_revision(snap.revision, "leveling", panel.leveling ? Json(*panel.leveling) : Json());
                out["offsets"] = std::move(list);
                send_json(res, out);
              }));

  server.Post("/api/panel/order", guarded([&](const httplib::Request& req, httplib::Response& res) {
                const Json body = body_of(req);
                const JsonReader r(body, "");
                const std::vector<std::string> order = r.string_list("log_order");
                const auto snap = service.mutate([&](const Project& p) { return set_log_order(p, order); },
                                                 expected_revision(req));
                const Panel& panel = snap.project->panel;
                const std::vector<double> distances = ruler_distances(panel, snap.project->logs);
                Json rulers = Json::array();
                for (std::size_t i = 0; i < distances.size(); ++i) {
                  rulers.push_back({{"left_log_id", panel.log_order[i]},
                                    {"right_log_id", panel.log_order[i + 1]},
                                    {"distance_m", distances[i]}});
                }
                Json out = with_revision(snap.revision, "log_order", panel.log_order);
                out["rulers"] = std::move(rulers);
                send_json(res, out);
              }));

  if (ui_dir && std::filesystem::is_directory(*ui_dir)) {
    server.set_mount_point("/", ui_dir->string());
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(
          "<!DOCTYPE html><html><head><title>incorr</title></head><body>"
          "<p>incorr service is running. The panel is at <a href=\"/api/panel.svg\">/api/panel.svg</a>.</p>"
          "</body></html>",
          "text/html");
    });
  }
}

int serve(const ServeOptions& options) {
  std::filesystem::create_directories(options.data_dir);
  const std::filesystem::path project_path = options.data_dir / "project.json";
  Project initial;
  if (std::filesystem::exists(project_path)) {
    LoadedProject loaded = load_project(read_file(project_path));
    for (const Finding& f : loaded.warnings) std::cerr << to_string(f) << "\n";
    initial = std::move(loaded.project);
  } else if (options.dataset) {
    initial = new_project(load_dataset(read_file(*options.dataset)));
    write_file_atomic(project_path, save_project(initial));
  } else {
    throw Error(ErrorCode::InvalidArgument,
                "no project.json in '" + options.data_dir.string() + "'; pass --dataset to start a new project");
  }

  ProjectService service(std::move(initial), project_path);
  httplib::Server server;
  install_routes(server, service, options.ui_dir);
  std::cerr << "serving " << project_path.string() << " on http://" << options.host << ":" << options.port << "\n";
  return server.listen(options.host, options.port) ? 0 : 1;
}

}  // namespace incorr
