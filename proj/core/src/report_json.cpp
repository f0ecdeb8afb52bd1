#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lavgap/verify.hpp"

namespace lavgap {

namespace {

using nlohmann::json;

json intervalToJson(const GammaInterval& gi) {
  json j;
  j["lo"] = gi.lo ? json(*gi.lo) : json(nullptr);
  j["hi"] = gi.hi ? json(*gi.hi) : json(nullptr);
  j["empty"] = gi.empty();
  return j;
}

json planJson(const SetupPlan& plan) {
  json j;
  j["setup"] = plan.setupId;
  j["N"] = plan.N;
  j["k"] = plan.k;
  j["p0"] = plan.p0;
  j["D"] = plan.frD;
  j["lambda"] = plan.lambda;
  j["meager"] = plan.meager;
  j["pointSet"] = plan.pointSet;
  j["cantorAxes"] = plan.cantorAxes;
  j["gamma"] = plan.gamma;
  j["admissibleGamma"] = intervalToJson(plan.admissibleGamma);
  j["swappedRoles"] = plan.swappedRoles;
  j["pairSign"] = plan.pairSign;
  j["rhoComplement"] = plan.rhoComplement;
  j["notes"] = plan.notes;
  return j;
}

json configJson(const RunConfig& c) {
  json j;
  j["family"] = c.family;
  j["p"] = c.p;
  j["q"] = c.q;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["kappa"] = c.kappa;
  j["pMinus"] = c.pMinus;
  j["pPlus"] = c.pPlus;
  j["p0"] = c.p0 ? json(*c.p0) : json(nullptr);
  j["N"] = c.N;
  j["k"] = c.k;
  j["setup"] = c.setup;
  j["gamma"] = c.gamma ? json(*c.gamma) : json(nullptr);
  j["cantorDepth"] = c.cantorDepth;
  j["cantorMaxDepth"] = c.cantorMaxDepth;
  j["meshCantorDepth"] = c.meshCantorDepth;
  j["radialLevels"] = c.radialLevels;
  j["gaussOrder"] = c.gaussOrder;
  j["gaussOrderHi"] = c.gaussOrderHi;
  j["openTol"] = c.openTol;
  j["faceTolerance"] = c.faceTolerance;
  j["faceMaxPanels"] = c.faceMaxPanels;
  j["tolPairing"] = c.tolPairing;
  j["tolTable"] = c.tolTable;
  j["tolStokes"] = c.tolStokes;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["disjointSamples"] = c.disjointSamples;
  j["stokesForms"] = c.stokesForms;
  j["continuityBudget"] = c.continuityBudget;
  j["gapGridSize"] = c.gapGridSize;
  j["gapTMin"] = c.gapTMin;
  j["gapTMax"] = c.gapTMax;
  j["assumptionGridSize"] = c.assumptionGridSize;
  j["nodeJitter"] = c.nodeJitter;
  return j;
}

json checkJson(const ModelCheck& check) {
  json j;
  j["admissible"] = check.admissible;
  j["gammaInterval"] = intervalToJson(check.gamma);
  j["violated"] = check.violated;
  j["notes"] = check.notes;
  return j;
}

}  // namespace

std::string configToJson(const RunConfig& cfg) { return configJson(cfg).dump(2); }

RunConfig configFromJsonText(const std::string& text) {
  json j = json::parse(text);
  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key) && !j[key].is_null()) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  get("family", c.family);
  get("p", c.p);
  get("q", c.q);
  get("alpha", c.alpha);
  get("beta", c.beta);
  get("kappa", c.kappa);
  get("pMinus", c.pMinus);
  get("pPlus", c.pPlus);
  if (j.contains("p0") && !j["p0"].is_null()) c.p0 = j["p0"].get<double>();
  get("N", c.N);
  get("k", c.k);
  get("setup", c.setup);
  if (j.contains("gamma") && !j["gamma"].is_null()) c.gamma = j["gamma"].get<double>();
  get("cantorDepth", c.cantorDepth);
  get("cantorMaxDepth", c.cantorMaxDepth);
  get("meshCantorDepth", c.meshCantorDepth);
  get("radialLevels", c.radialLevels);
  get("gaussOrder", c.gaussOrder);
  get("gaussOrderHi", c.gaussOrderHi);
  get("openTol", c.openTol);
  get("faceTolerance", c.faceTolerance);
  get("faceMaxPanels", c.faceMaxPanels);
  get("tolPairing", c.tolPairing);
  get("tolTable", c.tolTable);
  get("tolStokes", c.tolStokes);
  get("seed", c.seed);
  get("threads", c.threads);
  get("disjointSamples", c.disjointSamples);
  get("stokesForms", c.stokesForms);
  get("continuityBudget", c.continuityBudget);
  get("gapGridSize", c.gapGridSize);
  get("gapTMin", c.gapTMin);
  get("gapTMax", c.gapTMax);
  get("assumptionGridSize", c.assumptionGridSize);
  get("nodeJitter", c.nodeJitter);
  return c;
}

RunConfig configFromJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return configFromJsonText(buf.str());
}

std::string planToJson(const SetupPlan& plan, const ModelCheck& check,
                       const std::vector<std::string>& warnings,
                       const RunConfig* configEcho) {
  json j;
  j["schema"] = "lavgap-plan/1";
  if (configEcho) j["config"] = configJson(*configEcho);
  j["plan"] = planJson(plan);
  j["modelCheck"] = checkJson(check);
  j["warnings"] = warnings;
  return j.dump(2);
}

std::string reportToJson(const SeparationReport& r) {
  json j;
  j["schema"] = r.schema;
  j["config"] = configJson(r.config);
  j["plan"] = planJson(r.plan);
  j["modelCheck"] = checkJson(r.modelCheck);
  j["modelWarnings"] = r.modelWarnings;

  json conds = json::array();
  for (const auto& c : r.conditions) {
    json cj;
    cj["name"] = c.name;
    cj["pass"] = c.pass;
    cj["value"] = c.value;
    cj["error"] = c.error;
    cj["detail"] = c.detail;
    conds.push_back(cj);
  }
  j["conditions"] = conds;

  j["boundaryPairing"] = {{"ADu", r.pairingADu},
                          {"ADuError", r.pairingADuError},
                          {"uDA", r.pairingUDA},
                          {"uDAError", r.pairingUDAError}};

  j["functionalTable"] = r.functionalTable;
  j["functionalTableError"] = r.tableError;
  j["stokesResiduals"] = r.stokesResiduals;

  j["gap"] = {{"found", r.gap.found},
              {"tStar", r.gap.tStar},
              {"fMin", r.gap.fMin},
              {"tGrid", r.gap.tGrid},
              {"fValues", r.gap.fValues}};
  j["assumption"] = {{"found", r.assumption.found},
                     {"s", r.assumption.s},
                     {"t", r.assumption.t},
                     {"lhs", r.assumption.lhs},
                     {"rhs", r.assumption.rhs}};
  j["continuity"] = {{"constant", r.continuity.constant},
                     {"coarseConstant", r.continuity.coarseConstant},
                     {"modulus", r.continuity.modulus}};

  j["energies"] = {{"phi", r.energyPhi},
                   {"phiStar", r.energyPhiStar},
                   {"I1", r.reducedI1},
                   {"I2", r.reducedI2},
                   {"I1Verdict", r.i1Verdict},
                   {"I2Verdict", r.i2Verdict},
                   {"I1Fit", {r.i1FitExponent, r.i1FitLog}},
                   {"I2Fit", {r.i2FitExponent, r.i2FitLog}}};

  j["notes"] = r.notes;
  j["overall"] = r.overall;
  return j.dump(2);
}

}  // namespace lavgap
