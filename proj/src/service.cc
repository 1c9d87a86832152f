/*
 * Copyright 2026 The rdtrans Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rdtrans/service.h"

#include <charconv>
#include <cmath>
#include <map>

#include "httplib.h"
#include "rdtrans/error.h"

namespace rdtrans {

using Json = nlohmann::ordered_json;

namespace {

Json ErrorBody(std::string_view code, const std::string& message) {
  return Json{{"error", {{"code", code}, {"message", message}}}};
}

AdvisoryResponse Invalid(const std::string& message) {
  return {422, ErrorBody("validation_error", message)};
}

struct GopRequest {
  std::string gop_id;
  std::map<ResolutionTier, std::vector<RDPoint>> by_tier;
  std::string problem;  // first per-GOP validation failure
};

}  // namespace

Json RecommendationToJson(const Recommendation& rec) {
  return Json{
      {"gop_id", rec.gop_id},
      {"status", "ok"},
      {"cluster", rec.cluster},
      {"assignment_distance_db", rec.assignment_distance},
      {"native_tier", rec.native_tier.name()},
      {"chosen_tier", rec.chosen_tier.name()},
      {"target_bitrate_mbps", rec.target_bitrate},
      {"proposed_bitrate_mbps", rec.proposed_bitrate},
      {"modes_applied",
       {{"trans_size", rec.trans_sized},
        {"vl", rec.vl_capped},
        {"nzs", rec.nzs_reduced}}},
      {"predicted_psnr_db", rec.predicted_psnr},
      {"predicted_native_psnr_db", rec.predicted_native_psnr},
      {"target_clamped", rec.target_clamped},
      {"extrapolated", rec.extrapolated},
      {"rationale", rec.rationale},
  };
}

Json SavingsToJson(const SavingsReport& report) {
  Json videos = Json::array();
  for (const VideoSavings& v : report.videos) {
    videos.push_back({{"video", v.video},
                      {"gops", v.rows.size()},
                      {"total_target_mbps", v.total_target},
                      {"total_proposed_mbps", v.total_proposed},
                      {"saving_percent", v.saving_percent}});
  }
  return Json{{"videos", videos},
              {"total_target_mbps", report.total_target},
              {"total_proposed_mbps", report.total_proposed},
              {"saving_percent", report.saving_percent}};
}

AdvisoryResponse HandleAdvisoryRequest(std::string_view body,
                                       const DecisionEngine& engine) {
  Json request;
  try {
    request = Json::parse(body.begin(), body.end());
  } catch (const Json::parse_error& e) {
    return {400, ErrorBody("parse_error", std::string("request is not valid "
                                                      "JSON: ") +
                                              e.what())};
  }
  if (!request.is_object()) return Invalid("request must be a JSON object");

  auto target_it = request.find("target_bitrate");
  if (target_it == request.end() || !target_it->is_number()) {
    return Invalid("target_bitrate must be a number");
  }
  const double target = target_it->get<double>();
  if (!(target > 0.0) || !std::isfinite(target)) {
    return Invalid("target_bitrate must be positive");
  }

  Modes modes;
  auto modes_it = request.find("modes");
  try {
    if (modes_it == request.end()) {
      return Invalid("modes is required");
    } else if (modes_it->is_string()) {
      modes = Modes::Parse(modes_it->get<std::string>());
    } else if (modes_it->is_array()) {
      std::string joined;
      for (const Json& m : *modes_it) {
        if (!m.is_string()) return Invalid("modes entries must be strings");
        joined += m.get<std::string>() + ",";
      }
      modes = Modes::Parse(joined);
    } else {
      return Invalid("modes must be a string or an array of strings");
    }
  } catch (const Error& e) {
    return Invalid(e.what());
  }
  if (!modes.any()) return Invalid("at least one mode must be enabled");

  auto obs_it = request.find("observations");
  if (obs_it == request.end() || !obs_it->is_array()) {
    return Invalid("observations must be an array");
  }
  if (obs_it->empty()) return Invalid("request contains no GOPs");

  std::vector<GopRequest> gops;
  std::map<std::string, size_t> index_of;
  for (size_t i = 0; i < obs_it->size(); ++i) {
    const Json& o = (*obs_it)[i];
    const std::string where = "observations[" + std::to_string(i) + "]";
    if (!o.is_object()) return Invalid(where + " must be an object");
    auto id = o.find("gop_id");
    if (id == o.end() || !id->is_string() || id->get<std::string>().empty()) {
      return Invalid(where + ".gop_id must be a non-empty string");
    }
    const std::string gop_id = id->get<std::string>();
    auto [it, inserted] = index_of.try_emplace(gop_id, gops.size());
    if (inserted) gops.push_back({gop_id, {}, {}});
    GopRequest& gop = gops[it->second];

    auto tier_json = o.find("tier");
    auto bitrate = o.find("bitrate");
    auto psnr = o.find("psnr");
    if (tier_json == o.end() || !tier_json->is_string() ||
        bitrate == o.end() || !bitrate->is_number() || psnr == o.end() ||
        !psnr->is_number()) {
      if (gop.problem.empty()) {
        gop.problem = where + " needs tier (string), bitrate and psnr (numbers)";
      }
      continue;
    }
    const auto tier = ResolutionTier::Parse(tier_json->get<std::string>());
    if (!tier) {
      if (gop.problem.empty()) {
        gop.problem = where + " has unknown tier '" +
                      tier_json->get<std::string>() + "'";
      }
      continue;
    }
    gop.by_tier[*tier].push_back({bitrate->get<double>(), psnr->get<double>()});
  }

  Json recs = Json::array();
  VideoSavingsInput savings_input{"request", {}};
  for (const GopRequest& gop : gops) {
    if (!gop.problem.empty()) {
      recs.push_back({{"gop_id", gop.gop_id},
                      {"status", "error"},
                      {"error", {{"code", "validation_error"},
                                 {"message", gop.problem}}}});
      continue;
    }
    try {
      const auto& [tier, points] = *gop.by_tier.rbegin();
      const Recommendation rec =
          engine.Recommend({gop.gop_id, tier, points}, modes, target);
      recs.push_back(RecommendationToJson(rec));
      savings_input.rows.push_back({rec.target_bitrate, rec.proposed_bitrate});
    } catch (const Error& e) {
      recs.push_back({{"gop_id", gop.gop_id},
                      {"status", "error"},
                      {"error", {{"code", ErrorKindName(e.kind())},
                                 {"message", e.what()}}}});
    }
  }

  Json response{{"recommendations", recs}};
  if (savings_input.rows.empty()) {
    response["savings"] = nullptr;
  } else {
    response["savings"] = SavingsToJson(ComputeSavings({savings_input}));
  }
  return {200, response};
}

struct AdvisoryServer::Impl {
  std::shared_ptr<const DecisionEngine> engine;
  httplib::Server server;
  bool bound = false;
};

AdvisoryServer::AdvisoryServer(std::shared_ptr<const DecisionEngine> engine)
    : impl_(std::make_unique<Impl>()) {
  impl_->engine = std::move(engine);
  const DecisionEngine* shared = impl_->engine.get();
  impl_->server.Post(kAdvisoryRoute, [shared](const httplib::Request& req,
                                              httplib::Response& res) {
    AdvisoryResponse out;
    try {
      out = HandleAdvisoryRequest(req.body, *shared);
    } catch (const std::exception& e) {
      out = {500, ErrorBody("internal_error", e.what())};
    }
    res.status = out.http_status;
    res.set_content(out.body.dump(), "application/json");
  });
  // httplib's default adds SO_REUSEPORT, which would let a second server
  // share the port instead of failing to bind.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  impl_->server.set_error_handler(
      [](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        const std::string message =
            res.status == 404 ? "no route " + req.method + " " + req.path +
                                    " (use POST " + kAdvisoryRoute + ")"
                              : "request failed";
        res.set_content(ErrorBody("http_error", message).dump(),
                        "application/json");
      });
}

AdvisoryServer::~AdvisoryServer() { Stop(); }

int AdvisoryServer::Bind(const std::string& host, int port) {
  int bound_port = port;
  bool ok = false;
  if (port == 0) {
    bound_port = impl_->server.bind_to_any_port(host);
    ok = bound_port > 0;
  } else {
    ok = impl_->server.bind_to_port(host, port);
  }
  if (!ok) {
    throw Error(ErrorKind::kInput, "cannot bind " + host + ":" +
                                       std::to_string(port));
  }
  impl_->bound = true;
  return bound_port;
}

void AdvisoryServer::Listen() {
  if (!impl_->bound) throw Error(ErrorKind::kInput, "server is not bound");
  impl_->server.listen_after_bind();
}

void AdvisoryServer::WaitUntilReady() const {
  impl_->server.wait_until_ready();
}

void AdvisoryServer::Stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

std::pair<std::string, int> ParseBindAddress(std::string_view text) {
  std::string host = "127.0.0.1";
  std::string_view port_text = text;
  const size_t colon = text.rfind(':');
  if (colon != std::string_view::npos) {
    if (colon > 0) host = std::string(text.substr(0, colon));
    port_text = text.substr(colon + 1);
  }
  int port = -1;
  auto [ptr, ec] = std::from_chars(port_text.data(),
                                   port_text.data() + port_text.size(), port);
  if (ec != std::errc() || ptr != port_text.data() + port_text.size() ||
      port < 0 || port > 65535) {
    throw Error(ErrorKind::kInput,
                "bind address must be [host:]port, got '" + std::string(text) +
                    "'");
  }
  return {host, port};
}

}  // namespace rdtrans
