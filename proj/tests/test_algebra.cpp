#include <gtest/gtest.h>

#include "chp/algebra.hpp"
#include "chp/simplex.hpp"

using namespace chp;

TEST(Algebra, EmptyModel)
{
    LinearModel m = new_model();
    EXPECT_EQ(m.num_vars(), 0);
    EXPECT_EQ(m.num_constraints(), 0);
}

TEST(Algebra, OneDimensionalLp)
{
    LinearModel m;
    int x = m.add_variable("x", 0, 10);
    m.add_constraint({{x, 1.0}}, Sense::ge, 3, "x_ge_3");
    m.set_objective({{x, 1.0}}, 0);
    auto r = solve_lp(m);
    ASSERT_TRUE(r.ok());
    EXPECT_NEAR(r.objective, 3.0, 1e-9);
    EXPECT_NEAR(r.dual[m.find_constraint("x_ge_3")], 1.0, 1e-9);
}

TEST(Algebra, DuplicateTagRejected)
{
    LinearModel m;
    int x = m.add_variable("x", 0, 1);
    m.add_constraint({{x, 1.0}}, Sense::le, 1, "row");
    EXPECT_THROW(m.add_constraint({{x, 1.0}}, Sense::le, 1, "row"), ModelError);
}

TEST(Algebra, UnknownVariableRejected)
{
    LinearModel m;
    EXPECT_THROW(m.add_constraint({{3, 1.0}}, Sense::le, 1, "row"), ModelError);
}

TEST(Algebra, ExportContainsSections)
{
    LinearModel m;
    int x = m.add_variable("x", 0, 10);
    m.set_objective({{x, 1.0}}, 0);
    std::string txt = export_lp_text(m);
    EXPECT_NE(txt.find("Minimize"), std::string::npos);
    EXPECT_NE(txt.find("Bounds"), std::string::npos);
}

TEST(Algebra, ExportEqualityRow)
{
    LinearModel m;
    int x = m.add_variable("x", 0, 10);
    m.add_constraint({{x, 2.0}}, Sense::eq, 4, "eq");
    std::string txt = export_lp_text(m);
    EXPECT_NE(txt.find(" = 4\n"), std::string::npos);
}

TEST(Algebra, ExportDeterministic)
{
    LinearModel m;
    int x = m.add_variable("x[g1][t1]", -kInf, kInf);
    int b = m.add_variable("u", 0, 1, VarKind::binary);
    m.add_constraint({{x, 0.1}, {b, -3.25}}, Sense::le, 7.5, "r1");
    m.set_objective({{x, 1.0 / 3.0}, {b, 2}}, 1.5);
    EXPECT_EQ(export_lp_text(m), export_lp_text(m));
    LinearModel copy = m;
    EXPECT_EQ(export_lp_text(m), export_lp_text(copy));
}

TEST(Algebra, FixVariables)
{
    LinearModel m;
    int u = m.add_variable("u", 0, 1, VarKind::binary);
    int x = m.add_variable("x", 0, 10);
    auto f = fix_variables(m, {{u, 1.0}, {x, 5.0}});
    EXPECT_EQ(f.var(u).lower, 1.0);
    EXPECT_EQ(f.var(u).upper, 1.0);
    EXPECT_EQ(f.var(x).lower, 5.0);
    EXPECT_EQ(f.var(x).upper, 5.0);
    EXPECT_THROW(fix_variables(m, {{x, 11.0}}), ModelError);
}
