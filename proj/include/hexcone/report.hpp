#pragma once

#include "hexcone/berry.hpp"
#include "hexcone/planewave.hpp"
#include "hexcone/quotient.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace hexcone {

using ojson = nlohmann::ordered_json;

// %.17g; non-finite values print as nan / inf / -inf
std::string format_double(double x);

// two-space indented JSON, floats with 17 significant digits, non-finite as null
std::string dump_json(const ojson& j);

ojson to_json(const Quasimomentum& k);
ojson to_json(const ValidationReport& r);
ojson to_json(const RotationDecomposition& d);
ojson to_json(const IsospectralityReport& r);
ojson to_json(const std::vector<CensusEntry>& census);
ojson to_json(const ConeReport& c);
ojson to_json(const ConeFit& f);
ojson to_json(const BerryResult& b);
ojson to_json(const CrossingReport& r);
ojson to_json(const EpsilonReport& r);
ojson to_json(const SixfoldReport& r);

// CSV with a "# config <json>" line, then k1,k2,band0,...
std::string bands_csv(const BandStructure& bs, const ojson& config);
// epsilon,k1,k2,gap,line_residual,phase
std::string persistence_csv(const PersistenceTrace& t, const ojson& config);

}  // namespace hexcone
