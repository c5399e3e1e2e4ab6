#pragma once

// JSON encodings of the workbench inputs and reports.
//
// Integers and rationals travel as decimal strings ("-3", "2/5") so nothing
// is lost to doubles; plain JSON integers are accepted on input. Matrices are
// arrays of rows. Objects are strict: unknown keys raise SchemaError.

#include <initializer_list>
#include <optional>
#include <string>

#include <json.hpp>

#include "eqdiff/cartan.hpp"
#include "eqdiff/chern_weil.hpp"
#include "eqdiff/diffcoh.hpp"
#include "eqdiff/simplicial.hpp"

namespace eqdiff::io {

using json = nlohmann::json;
using linalg::Integer;
using linalg::IntMatrix;
using linalg::Rational;
using linalg::RatMatrix;

// Throws SchemaError unless j is an object whose keys all appear in
// `required` or `optional` and which has every required key.
void expect_object(const json& j, std::initializer_list<const char*> required,
                   std::initializer_list<const char*> optional, const std::string& context);

json to_json(const Integer& z);
json to_json(const Rational& q);
Integer integer_from_json(const json& j);
Rational rational_from_json(const json& j);

json to_json(const IntMatrix& m);
json to_json(const RatMatrix& m);
json to_json(const linalg::SparseIntMatrix& m);
// Shapes are checked when given; an empty array is a 0 x cols matrix.
IntMatrix int_matrix_from_json(const json& j, std::optional<std::size_t> rows = {},
                               std::optional<std::size_t> cols = {});
RatMatrix rat_matrix_from_json(const json& j, std::optional<std::size_t> rows = {},
                               std::optional<std::size_t> cols = {});

json to_json(const complexes::IntCochainComplex& c);
complexes::IntCochainComplex cochain_complex_from_json(const json& j);
json to_json(const complexes::DoubleComplex& dc);
complexes::DoubleComplex double_complex_from_json(const json& j);

// "cyclic:5" style names or {"name", "table"}.
json to_json(const simplicial::FiniteGroup& g);
simplicial::FiniteGroup group_from_json(const json& j);
// "point", "points:N", "polygon:N", "circle" or {"cells", "boundary"}.
json to_json(const simplicial::CellComplex& c);
simplicial::CellComplex cell_complex_from_json(const json& j);
// {"group", "space": name} for the named actions, or
// {"group", "space": cells, "generators": [{"element", "target", "sign"}]}.
json to_json(const simplicial::GAction& a);
simplicial::GAction action_from_json(const json& j);
// point, points:N, two-points, regular, coset:a,b,..., free-circle,
// trivial-circle, lens-s3:Q
simplicial::GAction named_action(const simplicial::FiniteGroup& g, const std::string& space);

json to_json(const linalg::FgAbGroup& g);
linalg::FgAbGroup fg_group_from_json(const json& j);
json to_json(const linalg::StructuredCoefGroup& g);
linalg::StructuredCoefGroup structured_group_from_json(const json& j);
json to_json(const linalg::MixedQuotient& q);
linalg::MixedQuotient mixed_quotient_from_json(const json& j);
json to_json(const linalg::MixedGroup& g);
linalg::MixedGroup mixed_group_from_json(const json& j);
json to_json(const simplicial::CohomologyValue& v);
simplicial::CohomologyValue cohomology_value_from_json(const json& j);

json to_json(const diffcoh::DiffCohReport& r);
diffcoh::DiffCohReport diffcoh_report_from_json(const json& j);
json to_json(const diffcoh::Corner& c);
json to_json(const diffcoh::CornerMap& m);
json to_json(const diffcoh::ExactnessCheck& c);
json to_json(const diffcoh::CommutativityCheck& c);
json to_json(const diffcoh::HexagonReport& r);
diffcoh::HexagonReport hexagon_report_from_json(const json& j);
json to_json(const diffcoh::SweepEntry& e);
diffcoh::SweepEntry sweep_entry_from_json(const json& j);
json to_json(const diffcoh::HomotopyFormulaReport& r);
diffcoh::HomotopyFormulaReport homotopy_report_from_json(const json& j);
json to_json(const diffcoh::IntervalCocycle& x);
diffcoh::IntervalCocycle interval_cocycle_from_json(const json& j);
json to_json(const diffcoh::SuppliedForms& f);
diffcoh::SuppliedForms supplied_forms_from_json(const json& j);

json to_json(const cartan::CartanCohomology& c);
cartan::CartanCohomology cartan_cohomology_from_json(const json& j);
// "rotation", "su2", "trivial:k,m" or {"algebra", "m", "rho", "finite"}.
json to_json(const cartan::LinearAction& a);
cartan::LinearAction linear_action_from_json(const json& j);
json to_json(const cartan::EquivariantForm& w);  // {"k", "m", "form"}
cartan::EquivariantForm form_from_json(const json& j);

json to_json(const chern_weil::BundleAction& b);
chern_weil::BundleAction bundle_action_from_json(const json& j, std::size_t k);

}  // namespace eqdiff::io
