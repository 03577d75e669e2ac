#pragma once

// JSON and CSV emission.

#include "bodyspec.hpp"
#include "lens.hpp"

#include <json.hpp>

#include <ostream>

namespace umbilic {

using Json = nlohmann::ordered_json;

inline Json gbJson(const GBReport &gb) {
    return Json{{"term_area", gb.termArea}, {"term_edges", gb.termEdges}, {"term_vertices", gb.termVertices}, {"residual", gb.residual}};
}

/// {c, lambda, n_facets, n_edges, n_vertices, area, volume_mc, volume_se, gb}
inline Json bodyReportJson(const LambdaPolyhedron &K, const GBReport &gb, const std::optional<MCEstimate> &mc) {
    Json j;
    j["c"] = K.c.value();
    j["lambda"] = K.lambda;
    j["n_facets"] = K.facets.size();
    j["n_edges"] = K.edges.size();
    j["n_vertices"] = K.vertices.size();
    j["area"] = gb.area;
    j["volume_mc"] = mc ? Json(mc->value) : Json(nullptr);
    j["volume_se"] = mc ? Json(mc->standardError) : Json(nullptr);
    j["gb"] = gbJson(gb);
    return j;
}

inline Json lensJson(const Lens &L) {
    Json j;
    j["c"] = L.c.value();
    j["lambda"] = L.lambda;
    j["half_width"] = L.halfWidth;
    j["ell_star"] = L.ellStar;
    j["beta_star"] = L.betaStar;
    j["area"] = L.area;
    j["volume"] = L.volume;
    j["inradius"] = L.inradius();
    j["gb"] = gbJson(gaussBonnetReport(L.body));
    return j;
}

inline Json gb2Json(const GB2Report &r) {
    return Json{{"lhs", r.lhs}, {"term_area", r.termArea}, {"term_perimeter", r.termPerimeter}, {"term_angles", r.termAngles}, {"residual", r.residual}};
}

inline Json polygonJson(const LambdaPolygon &P) {
    Json j;
    j["c"] = P.c.value();
    j["lambda"] = P.lambda;
    j["n_sides"] = P.sides.size();
    j["n_vertices"] = P.vertices.size();
    j["perimeter"] = P.perimeter;
    j["area"] = P.area;
    j["angles"] = P.angles;
    j["gb2"] = gb2Json(gb2Report(P));
    return j;
}

inline void writeFlowCsv(std::ostream &out, const FlowCurve &curve) {
    using detail::fmt17;
    out << "t,lambda_t,area,edge_sum,n_facets,n_edges,n_vertices\n";
    for (const auto &s : curve.samples)
        out << fmt17(s.t) << ',' << fmt17(s.lambdaT) << ',' << fmt17(s.area) << ',' << fmt17(s.edgeSum) << ',' << s.nFacets
            << ',' << s.nEdges << ',' << s.nVertices << '\n';
}

inline Json eventsJson(const FlowCurve &curve) {
    Json arr = Json::array();
    for (const auto &e : curve.events) arr.push_back(Json{{"t", e.t}, {"description", e.description}});
    return arr;
}

} // namespace umbilic
