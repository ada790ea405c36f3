#include <gtest/gtest.h>

#include "kerrcav/audit.hpp"

using namespace kerrcav;

namespace {

const AuditRow* find(const AuditReport& r, const std::string& check) {
    for (const auto& row : r.rows)
        if (row.check == check) return &row;
    return nullptr;
}

}  // namespace

TEST(Audit, ReportsKnownDefectsAndAgreements) {
    ModelParams p;
    p.kerr_ratio = 0.2;
    p.detuning_ratio = 1.0;
    AuditSettings settings;
    settings.random_states = 40;
    const AuditReport r = run_audit(p, settings);

    for (const char* d : {"EE rho_11", "EE rho_22", "EE rho_33", "EE rho_44", "EG rho_11", "EG rho_22", "EG rho_33",
                          "EG rho_44"}) {
        const AuditRow* row = find(r, d);
        ASSERT_NE(row, nullptr) << d;
        EXPECT_LT(row->max_abs, 1e-10) << d;
    }
    const AuditRow* k = find(r, "EG rho_13");
    ASSERT_NE(k, nullptr);
    EXPECT_EQ(k->max_abs, 0.0);
    EXPECT_NE(k->note.find("undefined symbol k"), std::string::npos);

    EXPECT_GT(find(r, "EE traced |rho_24 - rho_34|")->max_abs, 1e-6);
    EXPECT_GT(find(r, "EG rho_24")->max_abs, 1e-6);
    EXPECT_LT(find(r, "EG rho_24 with index n+1")->max_abs, 1e-10);
    EXPECT_GT(find(r, "EE rho_34")->max_abs, 1e-6);
    EXPECT_LT(r.max_discrepancy("EE overlap"), 1e-10);
    EXPECT_LT(r.max_discrepancy("EG overlap"), 1e-10);

    EXPECT_EQ(r.quartic_trials, 40);
    EXPECT_EQ(r.quartic_transcribed + r.quartic_corrected + r.quartic_fallback, 40);
    EXPECT_LT(r.quartic_max_path_gap, 1e-7);
    EXPECT_GT(r.coefficient_max_gap, 0.0);

    const std::string text = format_audit(r);
    EXPECT_NE(text.find("fallback"), std::string::npos);
}
