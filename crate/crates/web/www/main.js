// Expects the output of `wasm-bindgen --target web` in ./pkg.
import init, { explore, oracle_bracket, simulate_defaults } from "./pkg/endomass_web.js";

const $ = (id) => document.getElementById(id);

function axes(ctx, size) {
  ctx.clearRect(0, 0, size, size);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(20, 20, size - 40, size - 40);
}

// unit square -> canvas, y up
function toCanvas(size, x, y) {
  const s = size - 40;
  return [20 + x * s, size - 20 - y * s];
}

function drawExplore(r) {
  const c = $("plot");
  const ctx = c.getContext("2d");
  axes(ctx, c.width);
  ctx.fillStyle = "rgba(40, 110, 200, 0.12)";
  ctx.beginPath();
  ctx.moveTo(...toCanvas(c.width, 0, 0));
  r.x.forEach((x, i) => ctx.lineTo(...toCanvas(c.width, x, r.t[i])));
  ctx.lineTo(...toCanvas(c.width, 1, 0));
  ctx.fill();
  ctx.strokeStyle = "#1f5fb4";
  ctx.beginPath();
  r.x.forEach((x, i) => {
    const p = toCanvas(c.width, x, r.t[i]);
    i === 0 ? ctx.moveTo(...p) : ctx.lineTo(...p);
  });
  ctx.stroke();
  ctx.fillStyle = "#c0392b";
  r.x.forEach((x, i) => {
    const [px, py] = toCanvas(c.width, x, r.h[i]);
    ctx.fillRect(px - 0.75, py - 0.75, 1.5, 1.5);
  });
}

function update() {
  const kind = $("kind").value;
  const param = Number($("param").value);
  $("param-value").textContent = param;
  const r = JSON.parse(explore(kind, param, 800));
  if (r.error) {
    $("summary").textContent = r.error;
    return;
  }
  drawExplore(r);
  $("summary").textContent =
    `max mass ${r.mbar.toFixed(6)}   min mass ${r.mlow.toFixed(6)}   ` +
    `achieved by h ${r.achieved.toFixed(6)}   (${r.method})`;
}

function runOracle() {
  const r = JSON.parse(oracle_bracket($("kind").value, Number($("param").value), Number($("grid").value)));
  $("oracle").textContent = r.error
    ? r.error
    : `[${r.lower.toFixed(6)}, ${r.upper.toFixed(6)}] on ${r.n}x${r.n}, formula ${r.mbar.toFixed(6)}, ` +
      (r.contains ? "inside" : "OUTSIDE");
}

function runMc() {
  const r = JSON.parse(
    simulate_defaults(Number($("rate-x").value), Number($("rate-y").value),
      Number($("samples").value), BigInt($("seed").value)),
  );
  if (r.error) {
    $("mc").textContent = r.error;
    return;
  }
  const c = $("scatter");
  const ctx = c.getContext("2d");
  axes(ctx, c.width);
  const top = Math.max(...r.pairs.flat(), 1e-9);
  ctx.strokeStyle = "#bbb";
  ctx.beginPath();
  ctx.moveTo(...toCanvas(c.width, 0, 0));
  ctx.lineTo(...toCanvas(c.width, 1, 1));
  ctx.stroke();
  for (const [x, y] of r.pairs) {
    ctx.fillStyle = y <= x ? "#1f5fb4" : "#c0392b";
    const [px, py] = toCanvas(c.width, x / top, y / top);
    ctx.fillRect(px - 1, py - 1, 2, 2);
  }
  $("mc").textContent =
    `P(Y <= X): formula ${r.mbar.toFixed(6)}, simulated ${r.estimate.toFixed(6)} +- ${r.ci_halfwidth.toFixed(6)}`;
}

await init();
$("kind").addEventListener("change", update);
$("param").addEventListener("input", update);
$("run-oracle").addEventListener("click", runOracle);
$("run-mc").addEventListener("click", runMc);
update();
