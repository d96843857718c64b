#include "kanver/tradeoff_io.hpp"

#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include "kanver/errors.hpp"
#include "kanver/model_io.hpp"

namespace kanver {

std::uint64_t tradeoff_hash(const UnivariateUnit& unit, int grid_intervals, int max_pieces) {
  const std::string text = unit_to_json(unit).dump() + "|" + std::to_string(grid_intervals) +
                           "|" + std::to_string(max_pieces);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

nlohmann::json table_to_json(const TradeoffTable& t) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : t.entries) {
    nlohmann::json row = {{"pieces", e.pieces},
                          {"discrete_error", e.discrete_error},
                          {"corrected_error", e.corrected_error},
                          {"certified_budget", e.certified_budget},
                          {"breakpoints", e.pwa.breakpoints()},
                          {"values", e.pwa.values()}};
    // The exact-budget solution is stored only when it differs from the certificate.
    if (e.certified_budget != e.pieces) {
      row["budget_error"] = e.budget_error;
      row["budget_breakpoints"] = e.budget_pwa.breakpoints();
      row["budget_values"] = e.budget_pwa.values();
    }
    entries.push_back(std::move(row));
  }
  return {{"grid_intervals", t.grid_intervals}, {"lipschitz", t.lipschitz}, {"entries", entries}};
}

TradeoffTable table_from_json(const nlohmann::json& j) {
  TradeoffTable t;
  t.grid_intervals = j.at("grid_intervals").get<int>();
  t.lipschitz = j.at("lipschitz").get<double>();
  for (const auto& e : j.at("entries")) {
    PwaFunction pwa(e.at("breakpoints").get<std::vector<double>>(),
                    e.at("values").get<std::vector<double>>());
    const double corrected = e.at("corrected_error").get<double>();
    const bool own = e.contains("budget_breakpoints");
    PwaFunction budget_pwa = own ? PwaFunction(e.at("budget_breakpoints").get<std::vector<double>>(),
                                               e.at("budget_values").get<std::vector<double>>())
                                 : pwa;
    const double budget_error = own ? e.at("budget_error").get<double>() : corrected;
    t.entries.push_back(TradeoffEntry{e.at("pieces").get<int>(),
                                      e.at("discrete_error").get<double>(), corrected,
                                      e.at("certified_budget").get<int>(), std::move(pwa),
                                      std::move(budget_pwa), budget_error});
  }
  return t;
}

}  // namespace

nlohmann::json tradeoff_to_json(const KanNetwork& net, const std::vector<TradeoffTable>& tables,
                                int grid_intervals, int max_pieces) {
  if (tables.size() != net.num_units()) throw InvalidArgument("one table per unit required");
  nlohmann::json units = nlohmann::json::object();
  for (std::size_t u = 0; u < tables.size(); ++u) {
    const auto& id = net.unit_ids()[u];
    auto j = table_to_json(tables[u]);
    j["hash"] = hex(tradeoff_hash(net.unit(id), grid_intervals, max_pieces));
    units[id.str()] = std::move(j);
  }
  return {{"version", 1},
          {"grid_intervals", grid_intervals},
          {"max_pieces", max_pieces},
          {"units", units}};
}

std::vector<std::optional<TradeoffTable>> tradeoff_from_json(const nlohmann::json& doc,
                                                             const KanNetwork& net,
                                                             int grid_intervals, int max_pieces) {
  std::vector<std::optional<TradeoffTable>> out(net.num_units());
  if (!doc.is_object() || !doc.contains("units") || !doc["units"].is_object()) return out;
  const auto& units = doc["units"];
  for (std::size_t u = 0; u < out.size(); ++u) {
    const auto& id = net.unit_ids()[u];
    auto it = units.find(id.str());
    if (it == units.end()) continue;
    if (it->value("hash", "") != hex(tradeoff_hash(net.unit(id), grid_intervals, max_pieces))) {
      continue;
    }
    try {
      out[u] = table_from_json(*it);
    } catch (const std::exception&) {
      out[u].reset();
    }
  }
  return out;
}

std::vector<TradeoffTable> build_network_tables(const KanNetwork& net, int grid_intervals,
                                                int max_pieces,
                                                const std::optional<std::filesystem::path>& cache) {
  std::vector<std::optional<TradeoffTable>> cached(net.num_units());
  if (cache && std::filesystem::exists(*cache)) {
    std::ifstream in(*cache);
    auto doc = nlohmann::json::parse(in, nullptr, false);
    if (!doc.is_discarded()) cached = tradeoff_from_json(doc, net, grid_intervals, max_pieces);
  }
  std::vector<std::future<TradeoffTable>> jobs;
  for (std::size_t u = 0; u < net.num_units(); ++u) {
    if (cached[u]) continue;
    const UnivariateUnit* unit = &net.unit(net.unit_ids()[u]);
    jobs.push_back(std::async(std::launch::async, [unit, grid_intervals, max_pieces] {
      return build_tradeoff_table(*unit, Grid(unit->domain_limit(), grid_intervals), max_pieces);
    }));
  }
  std::vector<TradeoffTable> tables;
  tables.reserve(net.num_units());
  std::size_t next = 0;
  for (std::size_t u = 0; u < net.num_units(); ++u) {
    if (cached[u]) {
      tables.push_back(std::move(*cached[u]));
    } else {
      tables.push_back(jobs[next++].get());
    }
  }
  if (cache) {
    std::ofstream out(*cache);
    out << tradeoff_to_json(net, tables, grid_intervals, max_pieces).dump(1) << "\n";
  }
  return tables;
}

}  // namespace kanver
