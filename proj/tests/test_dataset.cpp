#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "bintex/dataset.hpp"
#include "test_util.hpp"

using namespace bintex;

namespace {

FeatureRecord make_record(const std::string& id, const std::string& family,
                          const std::string& main_class,
                          const std::vector<std::string>& names,
                          const std::vector<double>& values) {
    FeatureRecord rec;
    rec.source_id = id;
    rec.family = family;
    rec.main_class = main_class;
    rec.names = names;
    rec.values = values;
    return rec;
}

FeatureTable two_class_table(std::size_t per_class) {
    FeatureTable t;
    t.schema = {"x", "y"};
    for (std::size_t i = 0; i < per_class; ++i) {
        t.add(make_record("a" + std::to_string(i), "fam_a", "A", t.schema,
                          {static_cast<double>(i), 1.0}));
        t.add(make_record("b" + std::to_string(i), "fam_b", "B", t.schema,
                          {static_cast<double>(i), 2.0}));
    }
    return t;
}

std::multiset<std::string> ids_of(const FeatureTable& t) {
    std::multiset<std::string> ids;
    for (const auto& r : t.records) ids.insert(r.source_id);
    return ids;
}

} // namespace

TEST_CASE("class map parsing") {
    testutil::TempDir tmp;
    SECTION("comments, blanks and CRLF are tolerated") {
        testutil::spit(tmp / "map.tsv", std::string("# comment\n"
                                                    "\n"
                                                    "adialer.c\tDialer\r\n"
                                                    "lolyda.aa1\tPWS\n"));
        ClassMap map = load_class_map(tmp / "map.tsv");
        REQUIRE(map.size() == 2);
        CHECK(map.at("adialer.c") == "Dialer");
        CHECK(map.at("lolyda.aa1") == "PWS");
    }
    SECTION("rows without a tab are rejected with a line number") {
        testutil::spit(tmp / "bad.tsv", std::string("ok\tX\nnotab\n"));
        CHECK_THROWS_WITH(load_class_map(tmp / "bad.tsv"),
                          Catch::Matchers::ContainsSubstring("line 2"));
    }
    SECTION("empty fields are rejected") {
        testutil::spit(tmp / "bad.tsv", std::string("\tX\n"));
        CHECK_THROWS(load_class_map(tmp / "bad.tsv"));
        testutil::spit(tmp / "bad2.tsv", std::string("fam\t\n"));
        CHECK_THROWS(load_class_map(tmp / "bad2.tsv"));
    }
    SECTION("missing file") {
        CHECK_THROWS_WITH(load_class_map(tmp / "nope.tsv"),
                          Catch::Matchers::ContainsSubstring("cannot open class map"));
    }
}

TEST_CASE("corpus scanning") {
    testutil::TempDir tmp;
    namespace fs = std::filesystem;
    fs::create_directories(tmp / "corpus" / "zeus");
    fs::create_directories(tmp / "corpus" / "alpha");
    testutil::spit(tmp / "corpus" / "zeus" / "b.bin", std::string("zz"));
    testutil::spit(tmp / "corpus" / "zeus" / "a.bin", std::string("zz"));
    testutil::spit(tmp / "corpus" / "alpha" / "one.bin", std::string("aa"));
    testutil::spit(tmp / "corpus" / "stray.txt", std::string("ignored"));

    SECTION("entries come back sorted by family then filename") {
        ClassMap map = {{"alpha", "Worm"}, {"zeus", "Trojan"}};
        auto entries = scan_corpus(tmp / "corpus", map);
        REQUIRE(entries.size() == 3);
        CHECK(entries[0].family == "alpha");
        CHECK(entries[0].path.filename() == "one.bin");
        CHECK(entries[0].main_class == "Worm");
        CHECK(entries[1].path.filename() == "a.bin");
        CHECK(entries[2].path.filename() == "b.bin");
        CHECK(entries[2].main_class == "Trojan");
    }
    SECTION("families absent from the map are an error") {
        ClassMap map = {{"alpha", "Worm"}};
        CHECK_THROWS_WITH(scan_corpus(tmp / "corpus", map),
                          Catch::Matchers::ContainsSubstring("unmapped families: zeus"));
    }
    SECTION("an empty corpus is an error") {
        fs::create_directories(tmp / "none");
        CHECK_THROWS_WITH(scan_corpus(tmp / "none", {}),
                          Catch::Matchers::ContainsSubstring("empty corpus"));
    }
    SECTION("a non-directory root is an error") {
        CHECK_THROWS_WITH(scan_corpus(tmp / "corpus" / "stray.txt", {}),
                          Catch::Matchers::ContainsSubstring("not a directory"));
    }
}

TEST_CASE("table basics") {
    FeatureTable t = two_class_table(2);
    CHECK(t.size() == 4);
    CHECK(t.labels() == std::vector<std::string>{"A", "B"});
    t.label_mode = LabelMode::sub;
    CHECK(t.labels() == std::vector<std::string>{"fam_a", "fam_b"});
    CHECK(t.label_of(std::size_t{0}) == "fam_a");

    SECTION("schema mismatch is rejected") {
        CHECK_THROWS_WITH(t.add(make_record("x", "f", "M", {"x"}, {1.0})),
                          Catch::Matchers::ContainsSubstring("schema mismatch"));
    }
    SECTION("empty active label is rejected") {
        t.label_mode = LabelMode::main;
        CHECK_THROWS_WITH(t.add(make_record("x", "f", "", {"x", "y"}, {1.0, 2.0})),
                          Catch::Matchers::ContainsSubstring("without main label"));
    }
    SECTION("label mode strings round-trip") {
        CHECK(label_mode_from_string(to_string(LabelMode::main)) == LabelMode::main);
        CHECK(label_mode_from_string(to_string(LabelMode::sub)) == LabelMode::sub);
        CHECK_THROWS_WITH(label_mode_from_string("both"),
                          Catch::Matchers::ContainsSubstring("unknown label mode"));
    }
}

TEST_CASE("CSV writing produces the documented layout") {
    testutil::TempDir tmp;
    FeatureTable t;
    t.schema = {"energy", "entropy"};
    t.add(make_record("fam/a.bin", "fam", "Trojan", t.schema, {0.25, 3.0}));
    write_csv(t, tmp / "out.csv");
    auto bytes = testutil::slurp(tmp / "out.csv");
    std::string text(bytes.begin(), bytes.end());
    CHECK(text ==
          "source_id,family,main_class,energy,entropy\n"
          "fam/a.bin,fam,Trojan,0.25,3\n");
}

TEST_CASE("CSV round-trip keeps nine significant digits") {
    testutil::TempDir tmp;
    Rng rng(11);
    FeatureTable t;
    t.schema = {"a", "b", "c"};
    for (int i = 0; i < 50; ++i) {
        double scale = std::pow(10.0, static_cast<double>(rng.bounded(13)) - 6.0);
        t.add(make_record("id" + std::to_string(i), "f" + std::to_string(i % 3), "M",
                          t.schema,
                          {(rng.uniform() * 2 - 1) * scale, rng.normal(), rng.uniform()}));
    }
    write_csv(t, tmp / "t.csv");
    FeatureTable back = read_csv(tmp / "t.csv");
    REQUIRE(back.schema == t.schema);
    REQUIRE(back.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(back.records[i].source_id == t.records[i].source_id);
        CHECK(back.records[i].family == t.records[i].family);
        for (std::size_t c = 0; c < t.schema.size(); ++c) {
            double want = t.records[i].values[c];
            double got = back.records[i].values[c];
            REQUIRE(std::abs(got - want) <=
                    std::abs(want) * 1e-8 + 1e-300);
            REQUIRE(format_value(got) == format_value(want));
        }
    }
}

TEST_CASE("CSV parse failures carry the row number") {
    testutil::TempDir tmp;
    SECTION("non-numeric cell") {
        testutil::spit(tmp / "bad.csv", std::string("source_id,family,main_class,x\n"
                                                    "a,f,M,abc\n"));
        CHECK_THROWS_WITH(read_csv(tmp / "bad.csv"),
                          Catch::Matchers::ContainsSubstring("row 2") &&
                              Catch::Matchers::ContainsSubstring("abc") &&
                              Catch::Matchers::ContainsSubstring("column x"));
    }
    SECTION("wrong column count") {
        testutil::spit(tmp / "bad.csv", std::string("source_id,family,main_class,x\n"
                                                    "a,f,M,1,2\n"));
        CHECK_THROWS_WITH(read_csv(tmp / "bad.csv"),
                          Catch::Matchers::ContainsSubstring("expected 4 columns, got 5"));
    }
    SECTION("bad header") {
        testutil::spit(tmp / "bad.csv", std::string("id,family,main_class,x\na,f,M,1\n"));
        CHECK_THROWS_WITH(read_csv(tmp / "bad.csv"),
                          Catch::Matchers::ContainsSubstring("header"));
    }
    SECTION("unrepresentable label on write") {
        FeatureTable t;
        t.schema = {"x"};
        t.add(make_record("has,comma", "f", "M", t.schema, {1.0}));
        CHECK_THROWS_WITH(write_csv(t, tmp / "x.csv"),
                          Catch::Matchers::ContainsSubstring("not representable"));
    }
}

TEST_CASE("min-max normalization") {
    FeatureTable t;
    t.schema = {"x", "flat"};
    t.add(make_record("a", "f", "M", t.schema, {2.0, 7.0}));
    t.add(make_record("b", "f", "M", t.schema, {4.0, 7.0}));
    t.add(make_record("c", "f", "M", t.schema, {6.0, 7.0}));

    NormParams p = fit_normalization(t);
    CHECK(p.min_max[0] == std::pair{2.0, 6.0});
    CHECK(p.min_max[1] == std::pair{7.0, 7.0});

    FeatureTable n = apply_normalization(t, p);
    CHECK(n.records[0].values[0] == 0.0);
    CHECK(n.records[1].values[0] == 0.5);
    CHECK(n.records[2].values[0] == 1.0);
    for (const auto& rec : n.records) CHECK(rec.values[1] == 0.5);
    REQUIRE(n.norm_params.has_value());
    CHECK(*n.norm_params == p);

    SECTION("values outside the fitted range clamp to [0,1]") {
        FeatureTable other;
        other.schema = t.schema;
        other.add(make_record("d", "f", "M", t.schema, {-10.0, 7.0}));
        other.add(make_record("e", "f", "M", t.schema, {60.0, 7.0}));
        FeatureTable clamped = apply_normalization(other, p);
        CHECK(clamped.records[0].values[0] == 0.0);
        CHECK(clamped.records[1].values[0] == 1.0);
    }
    SECTION("normalized values invert back to the originals") {
        for (std::size_t i = 0; i < t.size(); ++i) {
            auto [lo, hi] = p.min_max[0];
            double recovered = lo + n.records[i].values[0] * (hi - lo);
            CHECK(recovered == Catch::Approx(t.records[i].values[0]).margin(1e-9));
        }
    }
    SECTION("errors") {
        CHECK_THROWS_WITH(fit_normalization(FeatureTable{}),
                          Catch::Matchers::ContainsSubstring("empty table"));
        NormParams wrong;
        wrong.min_max = {{0.0, 1.0}};
        CHECK_THROWS_WITH(apply_normalization(t, wrong),
                          Catch::Matchers::ContainsSubstring("do not match schema"));
    }
}

TEST_CASE("stratified splitting") {
    FeatureTable t = two_class_table(50);

    SECTION("a 0.2 fraction holds out 10 of each class") {
        auto [train, test] = stratified_split(t, 0.2, 7);
        CHECK(train.size() == 80);
        CHECK(test.size() == 20);
        int test_a = 0;
        for (const auto& r : test.records)
            if (r.main_class == "A") ++test_a;
        CHECK(test_a == 10);

        auto all = ids_of(train);
        for (const auto& id : ids_of(test)) all.insert(id);
        CHECK(all == ids_of(t));
    }
    SECTION("same seed reproduces the split, another seed moves it") {
        auto [train1, test1] = stratified_split(t, 0.2, 7);
        auto [train2, test2] = stratified_split(t, 0.2, 7);
        CHECK(ids_of(test1) == ids_of(test2));
        auto [train3, test3] = stratified_split(t, 0.2, 8);
        CHECK(ids_of(test1) != ids_of(test3));
    }
    SECTION("held-out count rounds half up") {
        FeatureTable small = two_class_table(3);
        auto [train, test] = stratified_split(small, 0.5, 1);
        CHECK(test.size() == 4);  // round(1.5) = 2 per class
        CHECK(train.size() == 2);
    }
    SECTION("every class keeps at least one record on each side") {
        FeatureTable small = two_class_table(4);
        auto [train_lo, test_lo] = stratified_split(small, 0.01, 1);
        CHECK(test_lo.size() == 2);
        auto [train_hi, test_hi] = stratified_split(small, 0.99, 1);
        CHECK(train_hi.size() == 2);
    }
    SECTION("singleton classes cannot be split") {
        FeatureTable t1;
        t1.schema = {"x"};
        t1.add(make_record("only", "f", "Solo", t1.schema, {1.0}));
        t1.add(make_record("o1", "f", "Pair", t1.schema, {1.0}));
        t1.add(make_record("o2", "f", "Pair", t1.schema, {2.0}));
        CHECK_THROWS_WITH(stratified_split(t1, 0.2, 1),
                          Catch::Matchers::ContainsSubstring("class Solo has fewer than 2"));
    }
    SECTION("fraction bounds") {
        CHECK_THROWS(stratified_split(t, 0.0, 1));
        CHECK_THROWS(stratified_split(t, 1.0, 1));
    }
}

TEST_CASE("stratified k-fold") {
    FeatureTable t = two_class_table(20);

    SECTION("four folds of a 40-record table validate 10 at a time") {
        auto folds = kfold(t, 4, 3);
        REQUIRE(folds.size() == 4);
        std::multiset<std::string> seen;
        for (const auto& [train, val] : folds) {
            CHECK(val.size() == 10);
            CHECK(train.size() == 30);
            int val_a = 0;
            for (const auto& r : val.records)
                if (r.main_class == "A") ++val_a;
            CHECK(val_a == 5);
            for (const auto& id : ids_of(val)) seen.insert(id);
        }
        CHECK(seen == ids_of(t));
    }
    SECTION("deterministic per seed") {
        auto a = kfold(t, 4, 3);
        auto b = kfold(t, 4, 3);
        for (std::size_t f = 0; f < a.size(); ++f)
            CHECK(ids_of(a[f].second) == ids_of(b[f].second));
    }
    SECTION("classes smaller than k are an error") {
        FeatureTable small = two_class_table(3);
        CHECK_THROWS_WITH(kfold(small, 5, 1),
                          Catch::Matchers::ContainsSubstring("has 3 records, fewer than k=5"));
    }
    SECTION("k below 2 is invalid") { CHECK_THROWS(kfold(t, 1, 1)); }
}

TEST_CASE("schema engineering for whole tables") {
    CHECK(engineered_schema({"a", "b"}, {Transform::cube, Transform::log}) ==
          std::vector<std::string>{"a", "b", "a_log", "a_cube", "b_log", "b_cube"});

    FeatureTable t;
    t.schema = {"x"};
    t.add(make_record("r", "f", "M", t.schema, {-2.0}));
    FeatureTable e = engineer_table(t, {Transform::square});
    CHECK(e.schema == std::vector<std::string>{"x", "x_sq"});
    CHECK(e.records[0].values == std::vector<double>{-2.0, 4.0});
    CHECK(e.label_mode == t.label_mode);
}
