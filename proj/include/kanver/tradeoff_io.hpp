#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"
#include "kanver/network.hpp"
#include "kanver/pwa.hpp"

namespace kanver {

/// FNV-1a over the canonical unit document and the grid settings.
std::uint64_t tradeoff_hash(const UnivariateUnit& unit, int grid_intervals, int max_pieces);

/// `.tradeoff.json`: tables keyed by "i_j_k", each tagged with its hash.
nlohmann::json tradeoff_to_json(const KanNetwork& net, const std::vector<TradeoffTable>& tables,
                                int grid_intervals, int max_pieces);
/// Tables in unit_ids() order; an entry is empty when the cache lacks the unit
/// or its hash no longer matches.
std::vector<std::optional<TradeoffTable>> tradeoff_from_json(const nlohmann::json& doc,
                                                             const KanNetwork& net,
                                                             int grid_intervals, int max_pieces);

/// One table per unit in unit_ids() order, built concurrently. With a cache
/// path, valid cached tables are reused and the file is rewritten afterwards.
std::vector<TradeoffTable> build_network_tables(
    const KanNetwork& net, int grid_intervals, int max_pieces,
    const std::optional<std::filesystem::path>& cache = std::nullopt);

}  // namespace kanver
