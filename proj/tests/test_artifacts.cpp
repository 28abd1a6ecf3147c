// SPDX-License-Identifier: Apache-2.0
#include "retro/artifacts.hpp"
#include "retro/error.hpp"
#include "random_fixtures.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <functional>
#include <random>
#include <sstream>

using namespace retro;
using retro::testing::at;
using retro::testing::random_commits;
using retro::testing::random_issues;
using retro::testing::fixture_dir;

namespace {

template <typename Parse>
auto parse_text(const std::string& s, Parse parse)
{
    std::istringstream in(s);
    return parse(in);
}

std::size_t format_error_line(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        if (e.code() == Errc::format && e.line())
            return *e.line();
    }
    return 0;
}

std::vector<CommitRecord> strip_patches(std::vector<CommitRecord> commits)
{
    for (auto& c : commits)
        for (auto& ch : c.changes)
            ch.patch.reset();
    return commits;
}

} // namespace

TEST_CASE("test-file heuristic")
{
    CHECK(is_test_path("tests/x"));
    CHECK(is_test_path("src/test/java/Foo.java"));
    CHECK(is_test_path("spec/models/user_spec.rb"));
    CHECK(is_test_path("pkg/parser_test.go"));
    CHECK(is_test_path("web/app.test.ts"));
    CHECK(is_test_path("src/TokenizerTest.java"));
    CHECK(is_test_path("FooTest"));
    CHECK_FALSE(is_test_path("src/main.cpp"));
    CHECK_FALSE(is_test_path("src/testing/util.cpp"));
    CHECK_FALSE(is_test_path("src/contest.cpp"));
    CHECK_FALSE(is_test_path("src/Testimony.java"));
    CHECK_FALSE(is_test_path("latest/x.c"));
}

TEST_CASE("commit jsonl")
{
    CHECK(parse_text("", parse_commit_jsonl).empty());

    auto one = parse_text(
        R"({"hash":"abc","author_email":"a@x","authored_at":"2019-01-08T10:00:00Z","message":"m","extra":1,)"
        R"("changes":[{"path":"src/main","added":10,"removed":2}]})",
        parse_commit_jsonl);
    REQUIRE(one.size() == 1);
    CHECK(one[0].hash == "abc");
    CHECK(one[0].author_email == "a@x");
    CHECK(one[0].authored_at == at("2019-01-08T10:00:00Z"));
    REQUIRE(one[0].changes.size() == 1);
    CHECK(one[0].changes[0].path == "src/main");
    CHECK(one[0].changes[0].added == 10);
    CHECK(one[0].changes[0].removed == 2);
    CHECK_FALSE(one[0].changes[0].patch);
    CHECK_FALSE(one[0].changes[0].is_test);

    CHECK(format_error_line([] {
              parse_text(R"({"author_email":"a@x","authored_at":"2019-01-08T10:00:00Z","message":"m","changes":[]})",
                         parse_commit_jsonl);
          }) == 1);
    CHECK(format_error_line([] {
              parse_text("\n{\"hash\":\"a\",\"author_email\":\"a\",\"authored_at\":\"2019-01-08T10:00:00Z\","
                         "\"message\":\"m\"}\n{not json}\n",
                         parse_commit_jsonl);
          }) == 3);
    CHECK(format_error_line([] {
              parse_text(R"({"hash":"a","author_email":"a","authored_at":"2019-01-08T10:00:00Z","message":"m",)"
                         R"("changes":[{"path":"p","added":-1,"removed":0}]})",
                         parse_commit_jsonl);
          }) == 1);
}

TEST_CASE("issue jsonl")
{
    CHECK(parse_text("", parse_issue_jsonl).empty());
    auto issues = parse_text(retro::testing::read_file(fixture_dir() / "issues.jsonl"), parse_issue_jsonl);
    REQUIRE(issues.size() == 5);
    CHECK(issues[0].id == "S-1");
    CHECK(issues[0].kind == IssueKind::story);
    CHECK(issues[0].story_points == 3.0);
    CHECK(issues[0].status == IssueStatus::done);
    CHECK(issues[0].closed_at == at("2019-01-11T10:00:00Z"));
    CHECK_FALSE(issues[2].story_points);
    CHECK(issues[4].story_points == 1.5);

    CHECK(format_error_line([] {
              parse_text(R"({"id":"1","kind":"bug","story_points":null,"status":"done",)"
                         R"("created_at":"2019-01-08T10:00:00Z","closed_at":null})",
                         parse_issue_jsonl);
          }) == 1);
    CHECK(format_error_line([] {
              parse_text(R"({"id":"1","kind":"epic","story_points":null,"status":"open",)"
                         R"("created_at":"2019-01-08T10:00:00Z","closed_at":null})",
                         parse_issue_jsonl);
          }) == 1);
    CHECK(format_error_line([] {
              parse_text(R"({"id":"1","kind":"bug","story_points":null,"status":"done",)"
                         R"("created_at":"2019-01-08T10:00:00Z","closed_at":"2019-01-07T10:00:00Z"})",
                         parse_issue_jsonl);
          }) == 1);
}

TEST_CASE("build jsonl")
{
    CHECK(parse_text("", parse_build_jsonl).empty());
    auto builds = parse_text(retro::testing::read_file(fixture_dir() / "builds.jsonl"), parse_build_jsonl);
    REQUIRE(builds.size() == 2);
    CHECK(builds[1].id == "ci-102");
    CHECK(builds[1].status == BuildStatus::failed);
    CHECK(builds[1].finished_at == at("2019-01-09T10:00:00Z"));
    CHECK(format_error_line([] {
              parse_text(R"({"id":"x","finished_at":"2019-01-09T10:00:00Z","status":"flaky"})", parse_build_jsonl);
          }) == 1);
}

TEST_CASE("git numstat parsing")
{
    CHECK(parse_git_numstat("").empty());

    auto two = parse_git_numstat("@h1|a@x|2019-01-08T10:00:00Z|first\n"
                                 "@h2|b@x|2019-01-09T10:00:00Z|second\n"
                                 "1\t2\tsrc/a.c\n"
                                 "3\t4\tsrc/b.c\n");
    REQUIRE(two.size() == 2);
    CHECK(two[0].changes.empty());
    REQUIRE(two[1].changes.size() == 2);
    CHECK(two[1].changes[1].path == "src/b.c");
    CHECK(two[1].changes[1].added == 3);
    CHECK(two[1].changes[1].removed == 4);

    auto binary = parse_git_numstat("@h|a@x|2019-01-08T10:00:00Z|logo\n-\t-\tlogo.png\n");
    CHECK_FALSE(binary[0].changes[0].added);
    CHECK_FALSE(binary[0].changes[0].removed);

    CHECK(format_error_line([] { parse_git_numstat("1\t2\tsrc/a.c\n"); }) == 1);
    CHECK(format_error_line([] { parse_git_numstat("@h|a@x|2019-01-08T10:00:00Z\n"); }) == 1);
    CHECK(format_error_line([] { parse_git_numstat("@h|a@x|not-a-date|s\n"); }) == 1);
    CHECK(format_error_line([] { parse_git_numstat("@h|a@x|2019-01-08T10:00:00Z|s\nx\t2\tp\n"); }) == 2);
}

TEST_CASE("numstat and jsonl exports of the same repository agree")
{
    auto from_numstat = parse_git_numstat(retro::testing::read_file(fixture_dir() / "repo_numstat.txt"));
    std::ifstream jsonl(fixture_dir() / "repo_commits.jsonl");
    auto from_jsonl = parse_commit_jsonl(jsonl);
    CHECK(from_numstat.size() == 4);
    CHECK(from_numstat == strip_patches(from_jsonl));
    CHECK(from_numstat[1].message == "Add parser tests | first batch");
}

TEST_CASE("store ordering and uniqueness")
{
    using retro::testing::commit;
    ArtifactStore s({commit("b", "x", "2019-01-09T00:00Z"), commit("a", "x", "2019-01-08T00:00Z")}, {}, {});
    CHECK(s.commits()[0].hash == "a");
    CHECK_THROWS_AS(ArtifactStore({commit("a", "x", "2019-01-09T00:00Z"), commit("a", "y", "2019-01-08T00:00Z")}, {},
                                  {}),
                    Error);
}

TEST_CASE("window")
{
    std::ifstream in(fixture_dir() / "window_commits.jsonl");
    ArtifactStore store(parse_commit_jsonl(in), {}, {});
    REQUIRE(store.commits().size() == 5);

    auto w = window(store, at("2019-01-07T00:00Z"), at("2019-01-21T00:00Z"));
    CHECK(w.commits().size() == 3);
    CHECK(w.commits().back().hash == "w4");
    CHECK(store.commits().size() == 5);

    CHECK(window(store, at("2019-01-10T12:00Z"), at("2019-01-10T12:00Z")).empty());
    CHECK_THROWS_AS(window(store, at("2019-01-11T00:00Z"), at("2019-01-10T00:00Z")), Error);

    std::ifstream issues_in(fixture_dir() / "issues.jsonl");
    ArtifactStore with_issues({}, parse_issue_jsonl(issues_in), {});
    auto late = window(with_issues, at("2019-01-21T00:00Z"), at("2019-02-04T00:00Z"));
    REQUIRE(late.issues().size() == 1);
    CHECK(late.issues()[0].id == "S-2");
}

TEST_CASE("jsonl serialization round-trips randomized records")
{
    std::mt19937_64 rng(5);
    for (int round = 0; round < 50; ++round) {
        auto commits = random_commits(rng, rng() % 20, at("2019-01-07T00:00Z"), 40);
        auto issues = random_issues(rng, rng() % 20, at("2019-01-07T00:00Z"), 20);
        std::vector<BuildRecord> builds;
        for (auto k = rng() % 5; k > 0; --k)
            builds.push_back(BuildRecord{"b" + std::to_string(k), at("2019-01-08T00:00Z") + Duration{rng() % 100000},
                                         rng() % 2 ? BuildStatus::passed : BuildStatus::failed});

        std::stringstream cs, is, bs;
        write_commit_jsonl(cs, commits);
        write_issue_jsonl(is, issues);
        write_build_jsonl(bs, builds);
        CHECK(parse_commit_jsonl(cs) == commits);
        CHECK(parse_issue_jsonl(is) == issues);
        CHECK(parse_build_jsonl(bs) == builds);
    }
}

TEST_CASE("window is idempotent")
{
    std::mt19937_64 rng(17);
    for (int round = 0; round < 100; ++round) {
        ArtifactStore s(random_commits(rng, rng() % 30, at("2019-01-07T00:00Z"), 40), random_issues(rng, rng() % 20, at("2019-01-07T00:00Z"), 20), {});
        auto a = at("2019-01-07T00:00Z") + Duration{static_cast<std::int64_t>(rng() % (30 * 86400))};
        auto b = a + Duration{static_cast<std::int64_t>(rng() % (15 * 86400))};
        auto once = window(s, a, b);
        CHECK(window(once, a, b) == once);
    }
}
