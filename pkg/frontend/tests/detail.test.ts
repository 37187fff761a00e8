/** Image detail: recommendation strip order, the exploration click loop,
 * the caption disclosure, and the not-found path. */

import { afterEach, expect, test } from "vitest";
import { click, mountAt, unmount } from "./helpers";
import { makeRecommendations, until } from "./stub";

afterEach(unmount);

test("strip order equals API order", async () => {
  const { app, root } = mountAt("#/image/img000");
  await app.settled;

  const expected = makeRecommendations("img000", 5).neighbors.map((n) => n.image_id);
  const shown = [...root.querySelectorAll<HTMLElement>(".rec-card")].map(
    (card) => card.dataset.id,
  );
  expect(shown).toEqual(expected);
});

test("clicking a recommendation navigates and fetches exactly one new strip", async () => {
  const { app, stub, root } = mountAt("#/image/img000");
  await app.settled;

  const before = stub.count("/api/images/img003/recommendations");
  expect(before).toBe(0);

  const firstCard = root.querySelector<HTMLElement>(".rec-card")!;
  expect(firstCard.dataset.id).toBe("img003");
  click(firstCard);
  await app.settled;
  await until(() => root.querySelectorAll(".rec-card").length > 0, "new strip");

  expect(window.location.hash).toBe("#/image/img003");
  expect(stub.count("/api/images/img003/recommendations")).toBe(1);
  expect(stub.count("/api/images/img000/recommendations")).toBe(1);
  // the new strip belongs to the new seed
  const shown = [...root.querySelectorAll<HTMLElement>(".rec-card")].map((c) => c.dataset.id);
  expect(shown).toEqual(makeRecommendations("img003", 5).neighbors.map((n) => n.image_id));
});

test("three successive recommendation clicks make three detail fetches", async () => {
  const { app, stub, root } = mountAt("#/image/img000");
  await app.settled;

  for (let step = 0; step < 3; step++) {
    const card = root.querySelector<HTMLElement>(".rec-card")!;
    click(card);
    await app.settled;
    await until(() => root.querySelectorAll(".rec-card").length > 0, "strip");
  }
  const detailCalls = stub.calls.filter((path) =>
    /^\/api\/images\/[^/]+$/.test(path.split("?")[0]!),
  );
  expect(detailCalls.length).toBe(4); // the seed plus three clicks
});

test("caption sits collapsed behind an auto-generated disclaimer", async () => {
  const { app, root } = mountAt("#/image/img001");
  await app.settled;

  const details = root.querySelector("details.caption")!;
  expect(details.hasAttribute("open")).toBe(false);
  expect(details.querySelector("summary")!.textContent).toContain("automatically generated");
  expect(details.textContent).toContain("Generated description of img001.");
});

test("explanation terms render beneath the strip in API order", async () => {
  const { app, root } = mountAt("#/image/img000");
  await app.settled;

  const terms = [...root.querySelectorAll(".explanation li")].map((li) => li.textContent);
  expect(terms).toEqual(["river", "barge", "dock", "fog", "gull"]);
  expect(terms.length).toBeLessThanOrEqual(5);
});

test("changing N refetches the strip once with the new size", async () => {
  const { app, stub, root } = mountAt("#/image/img000");
  await app.settled;

  const select = root.querySelector<HTMLSelectElement>(".n-select")!;
  select.value = "10";
  select.dispatchEvent(new Event("change", { bubbles: true }));
  await until(() => root.querySelectorAll(".rec-card").length === 10, "bigger strip");

  const recCalls = stub.calls.filter((path) => path.includes("/recommendations"));
  expect(recCalls).toEqual([
    "/api/images/img000/recommendations?n=5",
    "/api/images/img000/recommendations?n=10",
  ]);
  // reset the module-level default for other tests
  select.value = "5";
  select.dispatchEvent(new Event("change", { bubbles: true }));
  await until(() => root.querySelectorAll(".rec-card").length === 5, "strip back to 5");
});

test("unknown image shows not-found with a way back to the grid", async () => {
  const { app, root } = mountAt("#/image/missing");
  await app.settled;

  const panel = root.querySelector(".not-found")!;
  expect(panel.textContent).toContain("missing");
  const back = panel.querySelector<HTMLAnchorElement>("a")!;
  expect(back.getAttribute("href")).toBe("#/");
});
