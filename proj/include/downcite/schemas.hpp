#pragma once

namespace downcite::schema {

// Exact header rows of every CSV the toolkit reads or writes.
// Writers emit these verbatim; schema-check validates against them.

inline constexpr const char* downloads = "paper_id,access,pub_year,pub_month,year,month,downloads";
inline constexpr const char* citations = "paper_id,year,citations";
inline constexpr const char* curves = "paper_id,age_months,cumulative_downloads";
inline constexpr const char* cohort_profile = "access,age_months,median,p25,support";
inline constexpr const char* synchronous = "age_months,share";
inline constexpr const char* labels =
    "paper_id,access,burstiness,attractiveness,ageing,rmsd,half_life,delta_ratio";
inline constexpr const char* classify_summary = "access,axis,category,count,fraction_pct";
inline constexpr const char* fit_report = "age,observed_rho,fitted_rho,residual";
inline constexpr const char* cluster_membership =
    "paper_id,pub_year,delta_degrees,cluster,final_d,final_c";
inline constexpr const char* exclusions = "paper_id,reason";

} // namespace downcite::schema
