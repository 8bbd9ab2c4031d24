#include <algorithm>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "kmpe/data_io.hpp"
#include "kmpe/errors.hpp"

using namespace kmpe;

namespace {

LabeledDataset balanced(std::size_t pos, std::size_t neg) {
    LabeledDataset d;
    d.points = SampleSet(pos + neg, 1);
    for (std::size_t i = 0; i < pos + neg; ++i) {
        d.points.point(i)(0) = static_cast<double>(i);  // value doubles as the row id
        d.labels.push_back(i < pos);
    }
    return d;
}

std::multiset<double> ids(const SampleSet& s) {
    std::multiset<double> out;
    for (std::size_t i = 0; i < s.size(); ++i) out.insert(s.point(i)(0));
    return out;
}

template <class Fn>
std::string parse_error_message(Fn fn) {
    try {
        fn();
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("parse_samples_csv") {
    const SampleSet s = parse_samples_csv("1.0,2.0\n3.0,4.0");
    REQUIRE(s.size() == 2);
    CHECK(s.dim() == 2);
    CHECK(s.point(1)(0) == 3.0);
    CHECK(s.point(1)(1) == 4.0);

    CHECK(parse_samples_csv("1.5\r\n\n-2e3\n\n").size() == 2);
    CHECK(parse_samples_csv(" 1 , 2 \n").point(0)(1) == 2.0);

    CHECK(parse_error_message([] { parse_samples_csv("1.0,x"); }).find("row 1") != std::string::npos);
    CHECK(parse_error_message([] { parse_samples_csv("1,2\n3"); }).find("row 2") != std::string::npos);
    CHECK(parse_error_message([] { parse_samples_csv("1\n\n2,3"); }).find("row 3") != std::string::npos);
    CHECK_THROWS_AS(parse_samples_csv(""), ParseError);
    CHECK_THROWS_AS(parse_samples_csv("\n\n"), ParseError);
    CHECK_THROWS_AS(parse_samples_csv("1,nan"), ParseError);
    CHECK_THROWS_AS(parse_samples_csv("1,"), ParseError);
}

TEST_CASE("parse_labeled_csv") {
    const LabeledDataset d = parse_labeled_csv("1.0,1\n2.0,0");
    REQUIRE(d.points.size() == 2);
    CHECK(d.points.dim() == 1);
    CHECK(d.points.point(0)(0) == 1.0);
    CHECK(d.points.point(1)(0) == 2.0);
    CHECK(d.labels == std::vector<bool>{true, false});

    const LabeledDataset pm = parse_labeled_csv("0,0,+1\n1,1,-1\n2,2,1\n");
    CHECK(pm.labels == std::vector<bool>{true, false, true});
    CHECK(pm.positives() == 2);
    CHECK(pm.negatives() == 1);

    CHECK(parse_error_message([] { parse_labeled_csv("1.0,2"); }).find("row 1") != std::string::npos);
    CHECK_THROWS_AS(parse_labeled_csv("1.0"), ParseError);
}

TEST_CASE("files") {
    const auto dir = std::filesystem::temp_directory_path() / "kmpe_test_data_io";
    std::filesystem::create_directories(dir);
    const SampleSet s = SampleSet::from_rows({{0.1, -2.5e-7}, {1e300, 3.0}});
    write_text_file(dir / "s.csv", format_samples_csv(s));
    CHECK(load_samples_csv(dir / "s.csv") == s);
    CHECK(format_samples_csv(s) == "0.1,-2.5e-07\n1e+300,3\n");

    write_text_file(dir / "bad.csv", "1\nq\n");
    const std::string message = parse_error_message([&] { load_samples_csv(dir / "bad.csv"); });
    CHECK(message.find("bad.csv") != std::string::npos);
    CHECK(message.find("row 2") != std::string::npos);

    try {
        load_samples_csv(dir / "absent.csv");
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("absent.csv") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("construct_instance pool arithmetic") {
    const LabeledDataset d = balanced(100, 100);

    const MpeInstance half = construct_instance(d, {0.5, false, 40, 1});
    CHECK(*half.kappa_true == doctest::Approx(50.0 / 150.0).epsilon(1e-15));
    CHECK(half.mixture.size() == 30);  // 150/200 of 40
    CHECK(half.component.size() == 10);

    const MpeInstance quarter_left = construct_instance(d, {0.75, false, 40, 1});
    CHECK(*quarter_left.kappa_true == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(quarter_left.mixture.size() == 25);  // 125/200 of 40
    CHECK(quarter_left.component.size() == 15);

    // Component points are positives (ids < 100); the mixture never reuses them.
    const auto comp = ids(half.component);
    for (double id : comp) CHECK(id < 100.0);
    for (double id : ids(half.mixture)) CHECK(comp.count(id) == 0);
    CHECK(std::set<double>(comp.begin(), comp.end()).size() == comp.size());
    const auto mix = ids(half.mixture);
    CHECK(std::set<double>(mix.begin(), mix.end()).size() == mix.size());

    const double realized = *half.kappa_realized;
    const auto positives_drawn = static_cast<double>(std::count_if(mix.begin(), mix.end(), [](double id) { return id < 100.0; }));
    CHECK(realized == positives_drawn / static_cast<double>(mix.size()));
}

TEST_CASE("construct_instance determinism and flip") {
    const LabeledDataset d = balanced(60, 140);
    const MpeInstance a = construct_instance(d, {0.25, false, 100, 9});
    const MpeInstance b = construct_instance(d, {0.25, false, 100, 9});
    CHECK(a.mixture == b.mixture);
    CHECK(a.component == b.component);
    CHECK_FALSE(construct_instance(d, {0.25, false, 100, 10}).mixture == a.mixture);

    // Flipping the labels is the same as mirroring the dataset's classes.
    LabeledDataset mirrored = d;
    mirrored.labels.flip();
    const MpeInstance flipped = construct_instance(d, {0.25, true, 100, 9});
    const MpeInstance mirror = construct_instance(mirrored, {0.25, false, 100, 9});
    CHECK(flipped.mixture == mirror.mixture);
    CHECK(flipped.component == mirror.component);
    CHECK(*flipped.kappa_true == doctest::Approx(105.0 / 165.0).epsilon(1e-15));
    for (double id : ids(flipped.component)) CHECK(id >= 60.0);
}

TEST_CASE("construct_instance errors") {
    const LabeledDataset d = balanced(10, 10);
    CHECK_THROWS_AS(construct_instance(d, {0.0, false, 10, 0}), InputError);
    CHECK_THROWS_AS(construct_instance(d, {1.0, false, 10, 0}), InputError);
    CHECK_THROWS_AS(construct_instance(balanced(10, 0), {0.5, false, 4, 0}), InputError);
    CHECK_THROWS_AS(construct_instance(d, {0.5, false, 1, 0}), InputError);
    try {
        construct_instance(d, {0.5, false, 21, 0});
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("insufficient samples") != std::string::npos);
    }
}

TEST_CASE("synth_gaussian_pair") {
    const MpeInstance a = synth_gaussian_pair({0.3, 1, 6.0, 1000, 300, 7});
    const MpeInstance b = synth_gaussian_pair({0.3, 1, 6.0, 1000, 300, 7});
    CHECK(a.mixture == b.mixture);
    CHECK(a.component == b.component);
    CHECK(a.mixture.size() == 1000);
    CHECK(a.component.size() == 300);
    CHECK(*a.kappa_true == 0.3);
    CHECK(*a.kappa_realized == doctest::Approx(0.3).epsilon(0.2));

    // Separation 6: every draw lands on its own side of 3 except for tail mass ~1e-3.
    const auto mixture_low = std::count_if(a.mixture.matrix().col(0).begin(), a.mixture.matrix().col(0).end(),
                                           [](double x) { return x < 3.0; });
    CHECK(static_cast<double>(mixture_low) / 1000.0 == doctest::Approx(*a.kappa_realized).epsilon(0.01));
    CHECK(a.component.matrix().col(0).maxCoeff() < 3.0 + 1.0);

    const MpeInstance g_only = synth_gaussian_pair({0.0, 2, 6.0, 500, 10, 3});
    CHECK(*g_only.kappa_realized == 0.0);
    CHECK(g_only.mixture.matrix().col(0).mean() == doctest::Approx(6.0).epsilon(0.03));
    CHECK(g_only.mixture.dim() == 2);
    CHECK(std::abs(g_only.mixture.matrix().col(1).mean()) < 0.2);

    CHECK_THROWS_AS(synth_gaussian_pair({1.0, 1, 6.0, 10, 10, 0}), InputError);
    CHECK_THROWS_AS(synth_gaussian_pair({0.3, 0, 6.0, 10, 10, 0}), InputError);
    CHECK_THROWS_AS(synth_gaussian_pair({0.3, 1, -1.0, 10, 10, 0}), InputError);
    CHECK_THROWS_AS(synth_gaussian_pair({0.3, 1, 6.0, 0, 10, 0}), InputError);
}
