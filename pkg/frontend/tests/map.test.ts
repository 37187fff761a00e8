/** Projection map: one dot per image, clickable through to detail. */

import { afterEach, expect, test } from "vitest";
import { click, mountAt, unmount } from "./helpers";

afterEach(unmount);

test("renders one dot per projected image", async () => {
  const { app, root } = mountAt("#/map");
  await app.settled;

  const dots = root.querySelectorAll(".map-dot");
  expect(dots.length).toBe(24);
  expect(root.textContent).toContain("41.0% / 23.0%");
});

test("clicking a dot opens that image", async () => {
  const { app, root } = mountAt("#/map");
  await app.settled;

  const dot = root.querySelector<SVGCircleElement>(".map-dot")!;
  const id = dot.getAttribute("data-id")!;
  click(dot);
  await app.settled;
  expect(window.location.hash).toBe(`#/image/${encodeURIComponent(id)}`);
});
