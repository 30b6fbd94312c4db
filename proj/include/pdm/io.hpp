#pragma once

#include "pdm/solver.hpp"
#include "pdm/tatonnement.hpp"

#include <json.hpp>

namespace pdm {

using Json = nlohmann::json;

inline constexpr const char* kPdmSchema = "pdm/1";
inline constexpr const char* kFisherSchema = "fisher/1";

/// All parsers throw ParseError on malformed documents.
Json to_json(const UtilitySpec& spec);
UtilitySpec utility_from_json(const Json& j);

Json to_json(const PdmInstance& pdm);
PdmInstance pdm_from_json(const Json& j);

Json to_json(const GoodId& g);
GoodId good_from_json(const Json& j);

/// A reduced instance embeds its source PDM under "source"; parsing
/// re-derives the reduction and rejects documents that disagree with it.
Json to_json(const FisherInstance& fisher);
FisherInstance fisher_from_json(const Json& j);

Json to_json(const Outcome& z);
Outcome outcome_from_json(const Json& j);

/// Fisher results on a reduced instance carry a "pdm_projection" block with
/// per-agent issue bundles, personalized prices and the read-off outcome.
Json to_json(const SolveResult& r, const FisherInstance* reduced = nullptr);
SolveResult solve_result_from_json(const Json& j);

Json to_json(const EquilibriumReport& r);
EquilibriumReport report_from_json(const Json& j);

Json to_json(const TatonnementConfig& c);
TatonnementConfig tatonnement_config_from_json(const Json& j);

/// Summary without the per-step records.
Json summary_json(const TatonnementTrace& t);
Json summary_json(const LiftedResult& r);

/// Reads a whole file or "-" for stdin; throws ParseError.
Json read_json_file(const std::string& path);

} // namespace pdm
