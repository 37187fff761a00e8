/** Cluster grid against a stubbed 32-cluster API. */

import { afterEach, expect, test } from "vitest";
import { click, mountAt, unmount } from "./helpers";
import { until } from "./stub";

afterEach(unmount);

test("renders one cell per cluster with exactly six keywords", async () => {
  const { app, root } = mountAt("#/");
  await app.settled;

  const cells = root.querySelectorAll(".cluster-cell");
  expect(cells.length).toBe(32);
  for (const cell of cells) {
    expect(cell.querySelectorAll(".keywords li").length).toBe(6);
  }
});

test("cells follow order_position, not response order", async () => {
  const { app, root } = mountAt("#/");
  await app.settled;

  // the stub assigns order_position k-1-i to cluster i
  const ids = [...root.querySelectorAll(".cluster-cell")].map((cell) =>
    Number(cell.getAttribute("data-cluster")),
  );
  expect(ids[0]).toBe(31);
  expect(ids[31]).toBe(0);
  expect(ids).toEqual([...ids].sort((a, b) => b - a));
});

test("shows size badges and representative thumbnails", async () => {
  const { app, root } = mountAt("#/");
  await app.settled;

  const first = root.querySelector(".cluster-cell")!;
  expect(first.querySelector(".size-badge")!.textContent).toBe("36"); // cluster 31: 5 + 31
  const img = first.querySelector<HTMLImageElement>(".cluster-thumb")!;
  expect(img.getAttribute("src")).toContain("/thumbnail");
});

test("clicking a cell lists members; clicking a member opens the detail route", async () => {
  const { app, stub, root } = mountAt("#/");
  await app.settled;

  const cell = root.querySelector('.cluster-cell[data-cluster="2"]')!;
  click(cell);
  await until(() => root.querySelectorAll(".member-card").length > 0, "member cards");

  expect(stub.count("/api/clusters/2/images")).toBe(1);
  const member = root.querySelector<HTMLElement>(".member-card")!;
  const memberId = member.dataset.id!;
  click(member);
  await app.settled;

  expect(window.location.hash).toBe(`#/image/${encodeURIComponent(memberId)}`);
  expect(root.querySelector(".view-image")).not.toBeNull();
});

test("API failure shows a retry panel and no partial grid", async () => {
  const { app, root } = mountAt("#/", (stub) => stub.failNext("/api/clusters"));
  await app.settled;

  expect(root.querySelectorAll(".cluster-cell").length).toBe(0);
  const panel = root.querySelector(".error-panel");
  expect(panel).not.toBeNull();

  click(panel!.querySelector(".retry")!);
  await until(() => root.querySelectorAll(".cluster-cell").length === 32, "grid after retry");
});
