// Copyright 2026 The semdec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEMDEC_SERVICE_HPP
#define SEMDEC_SERVICE_HPP

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "semdec/corpus.hpp"
#include "semdec/decoder.hpp"
#include "semdec/extraction.hpp"
#include "semdec/kmeans.hpp"
#include "semdec/lexicon.hpp"
#include "semdec/model.hpp"

namespace semdec {

using nlohmann::json;

// ---------------------------------------------------------------------------
// JSON mirrors of the lexicon file columns and decoder output.

inline json to_json(const LexiconEntry& e) {
  json j = {{"surface", e.surface},
            {"field", e.fse.field},
            {"class", e.fse.semantic_class},
            {"micro_trait", e.fse.micro_trait},
            {"gender", to_string(e.fsy.gender)},
            {"number", to_string(e.fsy.number)},
            {"nature", e.fsy.nature}};
  j["synonym_set"] = e.synonym_set ? json(*e.synonym_set) : json(nullptr);
  return j;
}

inline json to_json(const ConstraintViolation& v) {
  return {{"constraint_id", v.constraint_id}, {"entries", v.entries}, {"message", v.message}};
}

inline json to_json(const std::vector<ConstraintViolation>& vs) {
  json arr = json::array();
  for (const auto& v : vs) arr.push_back(to_json(v));
  return arr;
}

inline json to_json(const DecodedUtterance& d) {
  json labels = json::array();
  for (const auto& l : d.labels) {
    labels.push_back({{"token", l.surface},
                      {"field", d.field},
                      {"class", l.semantic_class},
                      {"micro_trait", l.micro_trait},
                      {"probability", l.probability}});
  }
  return {{"utterance_type", {{"id", d.type_id}, {"probability", d.type_probability}}},
          {"type_distribution", d.type_distribution},
          {"labels", labels},
          {"skipped", d.skipped}};
}

// Malformed request body; `field` names the offending member.
class BadRequest : public std::invalid_argument {
 public:
  BadRequest(std::string field, const std::string& why)
      : std::invalid_argument(why), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline LexiconEntry entry_from_json(const std::string& surface, const json& j) {
  if (!j.is_object()) throw BadRequest("body", "body must be a JSON object");
  auto str = [&](const char* key, bool required) -> std::string {
    if (!j.contains(key) || j[key].is_null()) {
      if (required) throw BadRequest(key, std::string("missing field '") + key + "'");
      return {};
    }
    if (!j[key].is_string()) throw BadRequest(key, std::string("field '") + key + "' must be a string");
    return nfc(j[key].get<std::string>());
  };
  LexiconEntry e;
  e.surface = nfc(surface);
  if (j.contains("surface") && !j["surface"].is_null() && str("surface", false) != e.surface) {
    throw BadRequest("surface", "body surface does not match the URL");
  }
  e.fse = {str("field", true), str("class", true), str("micro_trait", true)};
  auto g = parse_gender(str("gender", false));
  if (!g) throw BadRequest("gender", "unknown gender");
  auto n = parse_number(str("number", false));
  if (!n) throw BadRequest("number", "unknown number");
  e.fsy = {*g, *n, str("nature", true)};
  std::string syn = str("synonym_set", false);
  if (!syn.empty()) e.synonym_set = syn;
  return e;
}

// ---------------------------------------------------------------------------

// Lexicon-building session behind the annotation endpoints. Readers get an
// immutable snapshot; mutations are serialized and each bumps the revision
// by one and rewrites the lexicon file.
class AnnotationService {
 public:
  struct Config {
    std::filesystem::path lexicon_path;  // empty: in-memory only
    std::filesystem::path corpus_path;   // labeled corpus, optional
    std::filesystem::path model_path;    // trained model, optional
    ConstraintConfig constraints;
    ExtractionConfig extraction;
    KMeansConfig kmeans;
  };

  struct Snapshot {
    std::shared_ptr<const Lexicon> lexicon;
    std::uint64_t revision = 0;
  };

  struct Mutation {
    std::uint64_t revision = 0;
    std::vector<ConstraintViolation> violations;
  };

  explicit AnnotationService(Config cfg) : cfg_(std::move(cfg)) {
    Lexicon lex;
    if (!cfg_.lexicon_path.empty() && std::filesystem::exists(cfg_.lexicon_path)) {
      lex = read_lexicon(cfg_.lexicon_path);
    }
    current_ = {std::make_shared<const Lexicon>(std::move(lex)), 0};
    if (!cfg_.corpus_path.empty()) corpus_ = read_labeled_corpus(cfg_.corpus_path);
  }

  Snapshot snapshot() const {
    std::lock_guard lock(snapshot_mu_);
    return current_;
  }

  std::vector<ConstraintViolation> validate_current() const {
    return validate(*snapshot().lexicon, cfg_.constraints);
  }

  // Upserts even when the edit introduces violations; they are reported
  // back for the annotator to resolve. A stale expected revision is
  // rejected with std::nullopt.
  std::optional<Mutation> upsert(LexiconEntry entry,
                                 std::optional<std::uint64_t> expected_revision = std::nullopt) {
    std::lock_guard writer(write_mu_);
    auto base = snapshot();
    if (expected_revision && *expected_revision != base.revision) return std::nullopt;
    auto next = std::make_shared<Lexicon>(*base.lexicon);
    next->add(std::move(entry));
    commit(std::move(next), base.revision + 1);
    return Mutation{base.revision + 1, validate(*snapshot().lexicon, cfg_.constraints)};
  }

  // New revision, or std::nullopt when the surface is unknown.
  std::optional<std::uint64_t> remove(const std::string& surface) {
    std::lock_guard writer(write_mu_);
    auto base = snapshot();
    if (!base.lexicon->contains(surface)) return std::nullopt;
    auto next = std::make_shared<Lexicon>(*base.lexicon);
    next->remove(surface);
    commit(std::move(next), base.revision + 1);
    return base.revision + 1;
  }

  const std::optional<LabeledCorpus>& corpus() const { return corpus_; }

  // The model file is re-read whenever it changes on disk.
  std::shared_ptr<const TrainedModel> model() {
    std::lock_guard lock(model_mu_);
    if (cfg_.model_path.empty() || !std::filesystem::exists(cfg_.model_path)) return model_;
    auto stamp = std::filesystem::last_write_time(cfg_.model_path);
    if (!model_ || stamp != model_stamp_) {
      model_ = std::make_shared<const TrainedModel>(read_model(cfg_.model_path));
      model_stamp_ = stamp;
    }
    return model_;
  }

  void set_model(TrainedModel m) {
    std::lock_guard lock(model_mu_);
    model_ = std::make_shared<const TrainedModel>(std::move(m));
  }

  void register_routes(httplib::Server& srv);

 private:
  void commit(std::shared_ptr<const Lexicon> next, std::uint64_t revision) {
    if (!cfg_.lexicon_path.empty()) write_lexicon(cfg_.lexicon_path, *next);
    std::lock_guard lock(snapshot_mu_);
    current_ = {std::move(next), revision};
  }

  Config cfg_;
  mutable std::mutex snapshot_mu_;
  std::mutex write_mu_;
  Snapshot current_;
  std::optional<LabeledCorpus> corpus_;
  std::mutex model_mu_;
  std::shared_ptr<const TrainedModel> model_;
  std::filesystem::file_time_type model_stamp_{};
};

namespace detail {

inline void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

inline void reply_error(httplib::Response& res, int status, const std::string& message,
                        const std::string& field = {}) {
  json body = {{"error", message}};
  if (!field.empty()) body["field"] = field;
  reply(res, status, body);
}

template <typename T>
T query_param(const httplib::Request& req, const char* name, T fallback) {
  if (!req.has_param(name)) return fallback;
  const std::string raw = req.get_param_value(name);
  try {
    std::size_t used = 0;
    T value;
    if constexpr (std::is_floating_point_v<T>) {
      value = static_cast<T>(std::stod(raw, &used));
    } else {
      value = static_cast<T>(std::stoll(raw, &used));
    }
    if (used != raw.size()) throw std::invalid_argument(raw);
    return value;
  } catch (const std::exception&) {
    throw BadRequest(name, std::string("query parameter '") + name + "' is not a number");
  }
}

}  // namespace detail

inline void AnnotationService::register_routes(httplib::Server& srv) {
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, PUT, POST, DELETE, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const BadRequest& e) {
      detail::reply_error(res, 400, e.what(), e.field());
    } catch (const InvalidEntry& e) {
      detail::reply_error(res, 400, e.what(), e.field());
    } catch (const std::exception& e) {
      detail::reply_error(res, 500, e.what());
    }
  });

  srv.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    detail::reply(res, 200, {{"status", "ok"}, {"revision", snapshot().revision}});
  });

  srv.Get("/lexicon", [this](const httplib::Request&, httplib::Response& res) {
    auto snap = snapshot();
    json entries = json::array();
    for (const auto& [_, e] : snap.lexicon->entries()) entries.push_back(to_json(e));
    detail::reply(res, 200, {{"revision", snap.revision}, {"entries", entries}});
  });

  srv.Put(R"(/lexicon/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded()) throw BadRequest("body", "body is not valid JSON");
    std::optional<std::uint64_t> expected;
    if (body.is_object() && body.contains("revision") && !body["revision"].is_null()) {
      if (!body["revision"].is_number_unsigned()) {
        throw BadRequest("revision", "revision must be a non-negative integer");
      }
      expected = body["revision"].get<std::uint64_t>();
    }
    auto entry = entry_from_json(req.matches[1].str(), body);
    auto result = upsert(std::move(entry), expected);
    if (!result) {
      detail::reply(res, 409, {{"error", "stale revision"}, {"revision", snapshot().revision}});
      return;
    }
    detail::reply(res, 200, {{"revision", result->revision}, {"violations", to_json(result->violations)}});
  });

  srv.Delete(R"(/lexicon/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    auto revision = remove(nfc(req.matches[1].str()));
    if (!revision) {
      detail::reply_error(res, 404, "no entry for '" + req.matches[1].str() + "'");
      return;
    }
    detail::reply(res, 200, {{"revision", *revision}});
  });

  srv.Post("/validate", [this](const httplib::Request&, httplib::Response& res) {
    auto snap = snapshot();
    detail::reply(res, 200, {{"revision", snap.revision},
                             {"violations", to_json(validate(*snap.lexicon, cfg_.constraints))}});
  });

  srv.Get("/suggest/classes", [this](const httplib::Request& req, httplib::Response& res) {
    if (!corpus_) {
      detail::reply_error(res, 409, "no corpus loaded; start the service with --corpus");
      return;
    }
    KMeansConfig km = cfg_.kmeans;
    km.k = detail::query_param<std::size_t>(req, "k", km.k);
    km.seed = detail::query_param<std::uint64_t>(req, "seed", km.seed);
    ClassCatalog catalog;
    try {
      catalog = kmeans_classes(corpus_->typed(), km);
    } catch (const std::invalid_argument& e) {
      throw BadRequest("k", e.what());
    }
    json classes = json::array();
    for (const auto& c : catalog.classes) {
      classes.push_back({{"class_id", c.class_id}, {"members", c.members}});
    }
    detail::reply(res, 200, {{"k", catalog.k}, {"classes", classes},
                             {"objective", catalog.objective_trace.back()}});
  });

  srv.Get("/suggest/refwords", [this](const httplib::Request& req, httplib::Response& res) {
    if (!corpus_) {
      detail::reply_error(res, 409, "no corpus loaded; start the service with --corpus");
      return;
    }
    ExtractionConfig ex = cfg_.extraction;
    ex.threshold = detail::query_param<double>(req, "threshold", ex.threshold);
    ex.max_ngram = detail::query_param<int>(req, "max_ngram", ex.max_ngram);
    ex.max_gap = detail::query_param<int>(req, "max_gap", ex.max_gap);
    std::map<std::string, std::vector<ReferenceWord>> refs;
    try {
      refs = extract_reference_words(corpus_->typed(), ex);
    } catch (const std::invalid_argument& e) {
      throw BadRequest("threshold", e.what());
    }
    json out = json::object();
    for (const auto& [type_id, list] : refs) {
      json arr = json::array();
      for (const auto& r : list) arr.push_back({{"tokens", r.tokens}, {"weight", r.weight}});
      out[type_id] = arr;
    }
    detail::reply(res, 200, {{"reference_words", out}});
  });

  srv.Post("/decode-preview", [this](const httplib::Request& req, httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) throw BadRequest("body", "body must be a JSON object");
    if (!body.contains("tokens") || !body["tokens"].is_array()) {
      throw BadRequest("tokens", "'tokens' must be an array of strings");
    }
    std::vector<std::string> tokens;
    for (const auto& t : body["tokens"]) {
      if (!t.is_string()) throw BadRequest("tokens", "'tokens' must be an array of strings");
      tokens.push_back(nfc(t.get<std::string>()));
    }
    auto m = model();
    if (!m) {
      detail::reply_error(res, 409, "no trained model available; run 'semdec train' first");
      return;
    }
    detail::reply(res, 200, to_json(decode(*m, *snapshot().lexicon, tokens)));
  });
}

// Runs an AnnotationService on a background thread; stops on destruction.
class ServiceHandle {
 public:
  ServiceHandle(AnnotationService::Config cfg, const std::string& host, int port)
      : service_(std::make_unique<AnnotationService>(std::move(cfg))),
        server_(std::make_unique<httplib::Server>()) {
    service_->register_routes(*server_);
    if (port == 0) {
      port_ = server_->bind_to_any_port(host);
    } else {
      port_ = server_->bind_to_port(host, port) ? port : -1;
    }
    if (port_ < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
  }

  ServiceHandle(const ServiceHandle&) = delete;
  ServiceHandle& operator=(const ServiceHandle&) = delete;

  ~ServiceHandle() { stop(); }

  void stop() {
    if (!thread_.joinable()) return;
    server_->stop();
    thread_.join();
  }

  void wait() {
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }
  AnnotationService& service() { return *service_; }

 private:
  std::unique_ptr<AnnotationService> service_;
  std::unique_ptr<httplib::Server> server_;
  int port_ = -1;
  std::thread thread_;
};

inline std::unique_ptr<ServiceHandle> serve_api(AnnotationService::Config cfg,
                                                const std::string& host = "127.0.0.1",
                                                int port = 0) {
  return std::make_unique<ServiceHandle>(std::move(cfg), host, port);
}

}  // namespace semdec

#endif  // SEMDEC_SERVICE_HPP
