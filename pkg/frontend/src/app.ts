// DOM wiring: registration form -> question batch -> submit -> progress.

import { ApiClient, TaskView } from './api.js'
import { BatchViewModel } from './batch.js'

const api = new ApiClient('')
let workerId: string | null = null
let batch: BatchViewModel | null = null

function $(id: string): HTMLElement {
  const el = document.getElementById(id)
  if (!el) throw new Error(`missing #${id}`)
  return el
}

function setStatus(text: string, isError = false): void {
  const el = $('status')
  el.textContent = text
  el.className = isError ? 'status error' : 'status'
}

function highlighted(task: TaskView): string {
  if (!task.surface) return escapeHtml(task.post_text)
  const text = escapeHtml(task.post_text)
  const surface = escapeHtml(task.surface)
  return text.replace(surface, `<mark>${surface}</mark>`)
}

function escapeHtml(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;')
}

function questionTitle(task: TaskView): string {
  if (task.kind === 'identification') return 'Is this post about the category?'
  if (task.kind === 'suggestion') return `What kind of issue is "${task.surface}"?`
  return `Pick the best correction for "${task.surface}" (or write your own)`
}

function renderBatch(): void {
  const container = $('questions')
  container.innerHTML = ''
  if (!batch) return
  batch.questions.forEach((q, i) => {
    const card = document.createElement('div')
    card.className = 'card'
    const options = q.task.options
      .map(
        (opt, idx) => `
        <label>
          <input type="radio" name="q-${q.task.task_id}" value="${idx}">
          ${escapeHtml(opt)}
        </label>`,
      )
      .join('')
    const freeText = q.task.allows_free_text
      ? `<input type="text" class="free-text" placeholder="your own correction"
           data-task="${q.task.task_id}">`
      : ''
    card.innerHTML = `
      <h3>Question ${i + 1} of ${batch!.questions.length}</h3>
      <p class="prompt">${questionTitle(q.task)}</p>
      <blockquote>${highlighted(q.task)}</blockquote>
      <div class="options">${options}${freeText}</div>
      <p class="q-error" data-error="${q.task.task_id}"></p>`
    container.appendChild(card)
  })

  container.querySelectorAll<HTMLInputElement>('input[type=radio]').forEach((input) => {
    input.addEventListener('change', () => {
      const taskId = input.name.slice(2)
      batch!.selectOption(taskId, Number(input.value))
      refreshSubmitState()
    })
  })
  container.querySelectorAll<HTMLInputElement>('input.free-text').forEach((input) => {
    input.addEventListener('input', () => {
      const taskId = input.dataset.task!
      const radios = container.querySelectorAll<HTMLInputElement>(
        `input[name="q-${taskId}"]`,
      )
      radios.forEach((r) => (r.checked = false))
      batch!.enterText(taskId, input.value)
      refreshSubmitState()
    })
  })
  refreshSubmitState()
}

function refreshSubmitState(): void {
  const button = $('submit') as HTMLButtonElement
  button.disabled = !batch || !batch.complete || batch.allSubmitted
}

async function refreshProgress(): Promise<void> {
  try {
    const p = await api.progress()
    $('progress').textContent =
      `${p.tasks_resolved} of ${p.tasks_total} tasks resolved, ` +
      `${p.answers_total} answers from ${p.workers} workers`
  } catch {
    // progress is cosmetic; ignore failures
  }
}

async function loadBatch(): Promise<void> {
  if (!workerId) return
  const { tasks, no_tasks_available } = await api.nextTasks(workerId, 10)
  if (no_tasks_available) {
    batch = null
    $('questions').innerHTML = ''
    setStatus('No tasks available right now. Thanks for helping!')
    refreshSubmitState()
    return
  }
  batch = new BatchViewModel(api, workerId, tasks)
  setStatus(`You have ${tasks.length} questions. Answer all of them to enable Submit.`)
  renderBatch()
}

async function onRegister(event: Event): Promise<void> {
  event.preventDefault()
  const name = ($('name') as HTMLInputElement).value.trim()
  const email = ($('email') as HTMLInputElement).value.trim()
  if (!name || !email) {
    setStatus('Both name and email are required.', true)
    return
  }
  try {
    workerId = await api.register(name, email)
  } catch (err) {
    setStatus(`Registration failed: ${err instanceof Error ? err.message : err}`, true)
    return
  }
  $('register-panel').hidden = true
  $('task-panel').hidden = false
  await loadBatch()
  await refreshProgress()
}

async function onSubmit(): Promise<void> {
  if (!batch) return
  const button = $('submit') as HTMLButtonElement
  button.disabled = true
  const { submitted, failed } = await batch.submitAll()
  if (failed > 0) {
    // selections are kept locally; the retry skips what already landed
    setStatus(`${submitted} answers saved, ${failed} failed. Check your ` +
      'connection and press Submit again to retry the rest.', true)
    batch.questions.forEach((q) => {
      const slot = document.querySelector(`[data-error="${q.task.task_id}"]`)
      if (slot) slot.textContent = q.error ?? ''
    })
    button.disabled = false
    return
  }
  setStatus('Batch saved. Loading your next questions...')
  await refreshProgress()
  await loadBatch()
}

export function start(): void {
  $('register-form').addEventListener('submit', onRegister)
  $('submit').addEventListener('click', onSubmit)
  void refreshProgress()
}

if (typeof document !== 'undefined' && document.getElementById('register-form')) {
  start()
}
