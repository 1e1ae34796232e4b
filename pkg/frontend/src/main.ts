import { ApiClient } from './api.js';
import { bucketAlerts, filterByStatus, paginate } from './queue.js';
import { renderBucket, renderRegistry, renderRetryBanner, renderSummary } from './render.js';
import { ReviewController } from './review.js';

// Browser bootstrap. All state lives on the server; this file only wires DOM
// events to the controller and re-renders from fresh server data.

const api = new ApiClient('');
const controller = new ReviewController(api, 'console');
const expandedBuckets = new Set<string>();
let statusFilter: string | undefined = 'pending';
let bucketPage = 0;

async function refresh(): Promise<void> {
  const root = document.getElementById('queue')!;
  try {
    await controller.load();
    const visible = filterByStatus(controller.alerts, statusFilter);
    const page = paginate(bucketAlerts(visible), bucketPage);
    bucketPage = page.page;
    const pager =
      page.pageCount > 1
        ? `<nav class="pager">
             <button data-action="page" data-delta="-1">prev</button>
             <span>page ${page.page + 1} / ${page.pageCount}</span>
             <button data-action="page" data-delta="1">next</button>
           </nav>`
        : '';
    root.innerHTML =
      page.items.length === 0
        ? '<div class="empty">queue is empty</div>'
        : page.items.map((b) => renderBucket(b, expandedBuckets.has(b.autoLabel))).join('') + pager;
    const summary = await api.getSummary();
    document.getElementById('summary')!.innerHTML = renderSummary(summary);
    const registry = await api.getRegistry();
    document.getElementById('registry')!.innerHTML = renderRegistry(registry.entries);
  } catch (err) {
    root.innerHTML = renderRetryBanner(err instanceof Error ? err.message : String(err));
  }
}

function inputValue(selector: string): string {
  const el = document.querySelector<HTMLInputElement>(selector);
  return el ? el.value : '';
}

async function onClick(event: Event): Promise<void> {
  const target = event.target as HTMLElement;
  const action = target.dataset.action;
  if (!action) return;
  if (action === 'retry') {
    await refresh();
    return;
  }
  if (action === 'toggle') {
    const label = target.dataset.bucket!;
    if (expandedBuckets.has(label)) expandedBuckets.delete(label);
    else expandedBuckets.add(label);
    await refresh();
    return;
  }
  if (action === 'confirm') {
    await controller.confirm(target.dataset.alert!);
    await refresh();
    return;
  }
  if (action === 'rename') {
    const id = target.dataset.alert!;
    const name = inputValue(`input[data-alert="${id}"]`);
    const outcome = await controller.rename(id, name);
    if (!outcome.ok && outcome.error) alert(outcome.error);
    await refresh();
    return;
  }
  if (action === 'rename-bucket') {
    const label = target.dataset.bucket!;
    const name = inputValue(`input[data-bucket="${label}"]`);
    const outcome = await controller.renameBucket(label, name);
    if (!outcome.ok && outcome.error) alert(outcome.error);
    await refresh();
    return;
  }
  if (action === 'filter') {
    statusFilter = target.dataset.status || undefined;
    bucketPage = 0;
    await refresh();
    return;
  }
  if (action === 'page') {
    bucketPage += Number(target.dataset.delta);
    await refresh();
  }
}

document.addEventListener('click', (e) => {
  void onClick(e);
});
void refresh();
setInterval(() => void refresh(), 15000);
